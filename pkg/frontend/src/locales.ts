// Instruction bundles. The survey config decides the locale (Estonian for the
// Balto-Finnic surveys, Russian for Komi); browser language is ignored.

export interface LocaleBundle {
  questionHeading: string;
  answerHeading: string;
  helpfulnessLabel: string;
  naturalnessLabel: string;
  scaleHint: string;
  submit: string;
  retry: string;
  networkError: string;
  done: string;
  progress: (answered: number, total: number) => string;
  leftLabel: string;
  rightLabel: string;
  tieLabel: string;
  pairwiseQuestion: string;
}

export const LOCALES: Record<string, LocaleBundle> = {
  et: {
    questionHeading: "Küsimus",
    answerHeading: "Mudeli vastus",
    helpfulnessLabel: "Kui kasulik see vastus on?",
    naturalnessLabel: "Kui loomulik see vastus keeleliselt on?",
    scaleHint: "1 = väga halb, 5 = väga hea",
    submit: "Saada hinnang",
    retry: "Proovi uuesti",
    networkError: "Võrguühendus ebaõnnestus. Sinu hinnang on alles.",
    done: "Aitäh! Küsitlus on lõpetatud.",
    progress: (answered, total) => `Vastatud ${answered}/${total}`,
    leftLabel: "Vasak tõlge",
    rightLabel: "Parem tõlge",
    tieLabel: "Võrdsed",
    pairwiseQuestion: "Kumb tõlge on parem?",
  },
  ru: {
    questionHeading: "Вопрос",
    answerHeading: "Ответ модели",
    helpfulnessLabel: "Насколько полезен этот ответ?",
    naturalnessLabel: "Насколько естественно звучит этот ответ?",
    scaleHint: "1 = очень плохо, 5 = очень хорошо",
    submit: "Отправить оценку",
    retry: "Повторить",
    networkError: "Сбой сети. Ваша оценка сохранена.",
    done: "Спасибо! Опрос завершён.",
    progress: (answered, total) => `Отвечено ${answered}/${total}`,
    leftLabel: "Левый перевод",
    rightLabel: "Правый перевод",
    tieLabel: "Одинаково",
    pairwiseQuestion: "Какой перевод лучше?",
  },
};

export function bundleFor(locale: string): LocaleBundle {
  const bundle = LOCALES[locale];
  if (!bundle) {
    throw new Error(`unsupported instruction locale: ${locale}`);
  }
  return bundle;
}

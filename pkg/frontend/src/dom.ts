import { bundleFor } from "./locales";
import { PairwiseSession, PairwiseUi } from "./pairwise";
import { SurveySession, SurveyUi } from "./survey";
import { VoteChoice } from "./types";

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function likertRow(name: string, label: string, onPick: (v: number) => void): HTMLElement {
  const row = el("fieldset", "likert");
  row.appendChild(el("legend", "likert-label", label));
  for (let v = 1; v <= 5; v++) {
    const wrap = el("label", "likert-option");
    const input = document.createElement("input");
    input.type = "radio";
    input.name = name;
    input.value = String(v);
    input.addEventListener("change", () => onPick(v));
    wrap.appendChild(input);
    wrap.appendChild(document.createTextNode(String(v)));
    row.appendChild(wrap);
  }
  return row;
}

/** Browser UI for the rating survey: renders into #app, resolves when the
 * annotator presses a submit button that only enables with both scales set. */
export function surveyDomUi(root: HTMLElement): SurveyUi {
  return {
    showQuestion(session: SurveySession): Promise<void> {
      const t = bundleFor(session.locale);
      const view = session.view;
      if (!view) {
        return Promise.resolve();
      }
      root.replaceChildren();
      root.appendChild(el("p", "progress", t.progress(view.progress.answered, view.progress.total)));
      root.appendChild(el("h2", "question-heading", t.questionHeading));
      root.appendChild(el("p", "question", view.question));
      root.appendChild(el("h2", "answer-heading", t.answerHeading));
      root.appendChild(el("p", "answer", view.answer));
      const submit = document.createElement("button");
      submit.textContent = t.submit;
      submit.disabled = true;
      const refresh = () => {
        submit.disabled = !session.canSubmit;
      };
      root.appendChild(likertRow("helpfulness", t.helpfulnessLabel, (v) => {
        session.setScore("helpfulness", v);
        refresh();
      }));
      root.appendChild(likertRow("naturalness", t.naturalnessLabel, (v) => {
        session.setScore("naturalness", v);
        refresh();
      }));
      root.appendChild(el("p", "hint", t.scaleHint));
      root.appendChild(submit);
      return new Promise((resolve) => {
        submit.addEventListener("click", () => {
          submit.disabled = true; // confirm before advancing, no optimistic UI
          resolve();
        });
      });
    },

    showRetryBanner(session: SurveySession): Promise<void> {
      const t = bundleFor(session.locale);
      const banner = el("div", "retry-banner", t.networkError);
      const button = document.createElement("button");
      button.textContent = t.retry;
      banner.appendChild(button);
      root.appendChild(banner);
      return new Promise((resolve) => button.addEventListener("click", () => resolve()));
    },

    showDone(): void {
      const t = bundleFor("et");
      root.replaceChildren(el("p", "done", t.done));
    },
  };
}

export function pairwiseDomUi(root: HTMLElement, locale: string): PairwiseUi {
  const t = bundleFor(locale);
  return {
    showItem(session: PairwiseSession): Promise<VoteChoice> {
      const view = session.view;
      root.replaceChildren();
      if (!view) {
        return Promise.resolve("tie");
      }
      root.appendChild(el("h2", "pairwise-question", t.pairwiseQuestion));
      root.appendChild(el("p", "left", `${t.leftLabel}: ${view.left}`));
      root.appendChild(el("p", "right", `${t.rightLabel}: ${view.right}`));
      return new Promise((resolve) => {
        (["left", "right", "tie"] as VoteChoice[]).forEach((choice) => {
          const button = document.createElement("button");
          button.textContent =
            choice === "left" ? t.leftLabel : choice === "right" ? t.rightLabel : t.tieLabel;
          button.addEventListener("click", () => resolve(choice));
          root.appendChild(button);
        });
      });
    },

    showRetryBanner(): Promise<void> {
      const button = document.createElement("button");
      button.textContent = t.retry;
      root.appendChild(el("div", "retry-banner", t.networkError)).appendChild(button);
      return new Promise((resolve) => button.addEventListener("click", () => resolve()));
    },

    showDone(): void {
      root.replaceChildren(el("p", "done", t.done));
    },
  };
}

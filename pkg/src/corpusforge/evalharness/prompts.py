"""Frozen evaluation prompt templates.

The template strings are load-bearing: downstream scores are only comparable
if rendering is bit-exact, so goldens pin every byte. Few-shot blocks are
joined with a blank line; pretrained-style shots append the answer after a
single space (completing the cue), instruction-style shots on the next line.
"""

from __future__ import annotations

from typing import Mapping, Sequence

SIB_TOPICS = (
    "science/technology",
    "travel",
    "politics",
    "sports",
    "health",
    "entertainment",
    "geography",
)

PRETRAINED_TEMPLATES = {
    "flores": "{src_lang}: {src}\n{tgt_lang}:",
    "belebele": (
        "P: {passage}\nQ: {question}\nA: {answer_1}\nB: {answer_2}\n"
        "C: {answer_3}\nD: {answer_4}\nAnswer:"
    ),
    "sib": (
        "Topic Classification: science/technology, travel, politics, sports, "
        "health, entertainment, geography.\n\nThe label of [{sentence}] is"
    ),
}

INSTRUCT_TEMPLATES = {
    "flores": "Translate the following {src_lang} text into {tgt_lang}.\n{src}",
    "belebele": (
        "Given the following passage, query, and answer choices, output the letter "
        "corresponding to the correct answer.\n###\nPassage:\n{passage}\n###\n"
        "Query:\n{query}\n###\nChoices:\n(A) {answer_1}\n(B) {answer_2}\n"
        "(C) {answer_3}\n(D) {answer_4}\n###\nAnswer:"
    ),
    "sib": (
        "Is this a piece of news regarding science/technology, travel, politics, "
        "sports, health, entertainment, or geography?\n{sentence}"
    ),
}

JUDGE_TEMPLATE = (
    "Your task is to verify if the given model output classifies a text correctly. "
    "Answers in other languages should be allowed if they meaning matches closely "
    'with the expected class (e.g. "See on teadusuudis" is correct when expected '
    'output is "science/technology").  If the model output does not choose a '
    "specific class, then the output is incorrect.\n\n"
    "### Expected class: {expected_answer}\n\n"
    "### Model output: {output_text}\n\n"
    "### Respond with Yes or No:"
)

_SHOT_SEPARATOR = "\n\n"


def _fields(item: Mapping) -> dict:
    kind = item.get("kind")
    if kind == "sib":
        return {"sentence": item["sentence"]}
    if kind == "flores":
        return {
            "src_lang": item["src_lang"],
            "tgt_lang": item["tgt_lang"],
            "src": item["src"],
        }
    if kind == "belebele":
        answers = item["answers"]
        if len(answers) != 4:
            raise ValueError("a multiple-choice item needs exactly 4 answers")
        return {
            "passage": item["passage"],
            "question": item["question"],
            "query": item["question"],
            "answer_1": answers[0],
            "answer_2": answers[1],
            "answer_3": answers[2],
            "answer_4": answers[3],
        }
    raise ValueError(f"unknown benchmark item kind {kind!r}")


def render_eval_prompt(
    item: Mapping,
    mode: str,
    shots: Sequence[tuple] = (),
) -> str:
    """Render an evaluation prompt for one benchmark item.

    mode is "pretrained" or "instruct"; shots is a sequence of (item, answer)
    pairs prepended in the given order.
    """
    if mode == "pretrained":
        templates = PRETRAINED_TEMPLATES
    elif mode == "instruct":
        templates = INSTRUCT_TEMPLATES
    else:
        raise ValueError(f"unknown mode {mode!r}")
    kind = item.get("kind")
    if kind not in templates:
        raise ValueError(f"unknown benchmark item kind {kind!r}")
    template = templates[kind]
    blocks = []
    for shot_item, answer in shots:
        if shot_item.get("kind") != kind:
            raise ValueError("few-shot examples must have the same kind as the item")
        filled = template.format(**_fields(shot_item))
        joiner = " " if mode == "pretrained" else "\n"
        blocks.append(filled + joiner + answer)
    blocks.append(template.format(**_fields(item)))
    return _SHOT_SEPARATOR.join(blocks)


def render_judge_prompt(expected_class: str, output_text: str) -> str:
    return JUDGE_TEMPLATE.format(expected_answer=expected_class, output_text=output_text)

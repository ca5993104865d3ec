#!/usr/bin/env python3
"""Writes the study-replica fixture: 12 participants x 3 sessions x 11 turns.

transcripts.jsonl  396 replayable turn records (emoji-free, lexicon-neutral replies)
annotations.jsonl  three annotators whose majority reproduces the reference
                   human x LLM error matrix cell for cell
feedback.jsonl     free-text feedback category labels (positive and negative)

Usage: make_study_fixture.py OUTDIR
"""
import json
import random
import sys
from pathlib import Path

HUMAN = ["ASR", "NoInputCaptured", "NoError"]
LLM = ["EthicalViolation", "Hallucination", "IgnoresHumanQuestion", "RespondsAsHuman",
       "Misunderstood", "RepeatsPreviousLine", "ReplyTooLong", "NoError"]
MATRIX = [
    [1, 0, 1, 5, 2, 1, 2, 82],
    [0, 2, 0, 0, 0, 3, 0, 2],
    [1, 13, 4, 7, 1, 11, 14, 244],
]
POSITIVE = [("Empathy and engagement", 23), ("Helpfulness and responsiveness", 17),
            ("Natural interaction", 12), ("Entertainment and fun", 11), ("Voice and tone", 10),
            ("Appearance and expressions", 9), ("Flexibility and adaptability", 4),
            ("Safety and ethics", 1)]
NEGATIVE = [("LLM problems", 10), ("ASR problems", 4), ("Short interaction", 4),
            ("Boring conversation topic", 4), ("Excessive actions", 4),
            ("Robot lack of guidance and self-disclosure", 3)]

# Word-disjoint so the repeat guard never fires on replay.
REPLIES = [
    "Hello there, my name is Haru.",
    "Where do you live?",
    "Tell me about your job.",
    "Which sport do you play?",
    "My favourite colour is blue.",
    "Do you have any pets at home?",
    "What did you eat for breakfast?",
    "Robots wake up early.",
    "Have you ever visited Tokyo?",
    "How many siblings do you have?",
    "It is time for me to go now.",
]
HUMAN_LINES = [
    "Hello Haru.", "I live in a small town.", "I work as a nurse.", "I play tennis.",
    "Mine is green.", "I have a cat.", "Toast and coffee.", "Me too.",
    "Not yet.", "Two brothers.", "Bye Haru.",
]
STAMP = "1970-01-01T00:00:00.000Z"


def speech(text):
    genre = "question" if text.rstrip().endswith("?") else "default"
    return {"kind": "speech", "text": text, "genre": genre}


def main(outdir):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20231019)

    keys = []
    records = []
    for participant in range(1, 13):
        for session in range(1, 4):
            sid = f"p{participant:02d}-s{session}"
            for index in range(1, 12):
                reply = REPLIES[index - 1]
                records.append({
                    "session_id": sid, "index": index, "human_text": HUMAN_LINES[index - 1],
                    "llm_raw": reply, "guarded_text": reply,
                    "guard_flags": {"stripped_human_turn": False, "repeated_previous_line": False,
                                    "truncated_for_length": False},
                    "script": [speech(reply)],
                    "emotions": [{"label": "neutral", "confidence": 1.0}],
                    "seed": rng.getrandbits(64), "t_request": STAMP, "t_response": STAMP,
                    "classifier_fallback": False, "regenerations": 0,
                })
                keys.append((sid, index))

    labels = [(HUMAN[h], LLM[l]) for h, row in enumerate(MATRIX) for l, n in enumerate(row)
              for _ in range(n)]
    assert len(labels) == len(keys) == 396
    rng.shuffle(labels)

    annotations = []
    for (sid, index), (human, llm) in zip(keys, labels):
        for annotator in ("A", "B", "C"):
            human_label, llm_label = human, llm
            # Annotator C dissents on roughly one turn in ten; A and B still carry the majority.
            if annotator == "C" and rng.random() < 0.1:
                llm_label = rng.choice([x for x in LLM if x != llm])
            annotations.append({"session_id": sid, "index": index, "human_error": human_label,
                                "llm_error": llm_label, "annotator": annotator})

    feedback = [{"polarity": "positive", "category": c} for c, n in POSITIVE for _ in range(n)]
    feedback += [{"polarity": "negative", "category": c} for c, n in NEGATIVE for _ in range(n)]

    def dump(name, rows):
        with open(out / name, "w", encoding="utf-8") as f:
            for row in rows:
                f.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")

    dump("transcripts.jsonl", records)
    dump("annotations.jsonl", annotations)
    dump("feedback.jsonl", feedback)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/study")

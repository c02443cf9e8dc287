"""Toy GRPO-style loop: sample responses, score them through a replayed
judge, and turn the scores into group-relative advantages.

The "policy" picks canned answers at random and the judge replies come from
a replay file written at startup, so the loop runs offline and is fully
deterministic.
"""

import json
import random
import tempfile

import rubric_reward as rr

GROUP = 4
ANSWERS = ["18:15", "06:15", "18:45", "noon"]


def rubric_for(i):
    return {
        "essential": [
            {"criterion": "Reads the clock time.",
             "reference": "time_verify(target='18:15', tformat='%H:%M')", "weight": 3},
            {"criterion": "Explains how the hands were read.",
             "reference": "The short hand is past six and the long hand is on three.", "weight": 2},
        ],
        "additional": [
            {"criterion": "Names the clock face.",
             "reference": f"text_verify(target='Station Clock {i}')", "weight": 1},
        ],
    }


def judge_reply(answer, explained, i):
    return {
        "thought": "compare the extracted time with the question",
        "essential": [
            {"criterion": "Reads the clock time.", "rationale": "",
             "credit": f"time_verify(predict='{answer}', pformat='%H:%M')"},
            {"criterion": "Explains how the hands were read.", "rationale": "",
             "credit": 1 if explained else 0},
        ],
        "additional": [
            {"criterion": "Names the clock face.", "rationale": "",
             "credit": f"text_verify(predict='Station Clock {i}')"},
        ],
    }


def main():
    rng = random.Random(7)
    engine = rr.BoundEngine(tau=0.5, max_length=512)

    # Sample every rollout up front and record what the judge "said".
    batches, records = [], []
    for i in range(10):
        rollouts = []
        for g in range(GROUP):
            answer = rng.choice(ANSWERS)
            explained = rng.random() < 0.6
            task = {"id": f"toy-{i}-{g}", "prompt": "What time does the clock show?",
                    "response": f"It shows {answer}.", "response_length": rng.randrange(40, 600)}
            rollouts.append(task)
            records.append({"request_id": task["id"],
                            "text": json.dumps(judge_reply(answer, explained, i))})
        batches.append(rollouts)

    with tempfile.NamedTemporaryFile("w", suffix=".jsonl", delete=False) as f:
        f.write("".join(json.dumps(r) + "\n" for r in records))
        replay = rr.ReplayTransport(f.name)

    for i, rollouts in enumerate(batches):
        rubric = json.dumps(rubric_for(i))
        scorings = [rr.request_scoring(json.dumps(t), rubric, replay) for t in rollouts]
        rows = engine.score_group(rubric, scorings, [t["response_length"] for t in rollouts],
                                  [t["response"] for t in rollouts])
        rewards = " ".join(f"{r['final']:.3f}" for r in rows)
        advantages = " ".join(f"{r['advantage']:+.3f}" for r in rows)
        kind = "non-zero" if any(r["advantage"] != 0.0 for r in rows) else "zero"
        print(f"instance {i}: rewards [{rewards}] advantages [{advantages}] ({kind})")


if __name__ == "__main__":
    main()

"""Smoke test for the `chunkwm` extension module.

Build it first, e.g. `maturin develop -m crates/py/Cargo.toml`, or
`cargo build -p chunkwm-py --features extension-module` and put
target/debug/libchunkwm.so on PYTHONPATH as chunkwm.so.
"""

import json

import chunkwm


def main():
    assert "tyreworld" in chunkwm.tasks()
    assert chunkwm.instances("tyreworld")[0] == "t1"

    env = chunkwm.Environment("tyreworld", "t1")
    print(env.observation())
    print(env.goal_text())
    obs, ok, done = env.act("Open boot.")
    assert ok and not done, obs
    obs, ok, _ = env.act("fly to the moon")
    assert not ok
    assert "Close boot." in env.valid_actions()

    lines = []
    for variant in ("STD", "OURS"):
        replies = chunkwm.plan_script("gripper", "g1", variant)
        line = chunkwm.run_replay("gripper", "g1", variant, replies)
        record = json.loads(line)
        assert record["success"], record["trial_id"]
        lines.append(line)
    print(chunkwm.report("".join(lines)))

    stat, p, n = chunkwm.wilcoxon([1.0, 2.0, 3.0, 4.0, 5.0], [0.0, 0.5, 1.0, 1.5, 7.0])
    assert n == 5 and 0.0 < p <= 1.0
    print(f"W={stat} p={p:.4f}")

    passed, matrix = chunkwm.envcheck("gripper")
    assert passed, matrix

    try:
        chunkwm.Environment("jericho", "t1")
    except ValueError as e:
        print("rejected:", e)
    else:
        raise AssertionError("unknown task accepted")
    print("smoke test passed")


if __name__ == "__main__":
    main()

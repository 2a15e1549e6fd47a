"""Smoke test for the workfunc extension module.

Build and install first, e.g.
    pip install --no-build-isolation -e crates/py
then run
    python python/smoke_test.py
"""

import math

import workfunc


def close(actual, expected, tol):
    return abs(actual / expected - 1.0) <= tol


def main():
    devices = {name: rate for name, _, _, rate in workfunc.catalog()}
    assert close(devices["ati-radeon-5870"], 18.3e17, 0.005), devices

    des = workfunc.brute_force(56)
    assert close(des["expected_seconds"], 133.0, 0.01), des
    assert des["worst_case_seconds"] == 2 * des["expected_seconds"]

    cluster = workfunc.brute_force(96, fleet_size=65536)
    years = cluster["expected_seconds"] / (365 * 86400)
    assert close(years, 120.8, 0.002), years
    assert abs(workfunc.progress_years(years / 2) - 6.8) < 0.1

    d = workfunc.dictionary(56, 6)
    assert d["expected_comparisons"] == 50
    assert close(d["dictionary_bytes"], 3.1e16, 0.02)

    t = workfunc.tf1(56, fleet_size=65536)
    assert close(t["expected_seconds"] / 86400, 9.42, 0.01), t

    for table_id in (1, 2, 3):
        text, ok = workfunc.table(table_id)
        assert ok, text
    csv, _ = workfunc.table(3, csv=True)
    assert csv.splitlines()[0].startswith("w:num")

    won = workfunc.play_otp(0.6, 1000, 42, budget=1e12)
    assert won["result"] == "won", won["result"]
    assert abs(won["successes"] / won["trials"] - workfunc.otp_oracle(0.6)) < 0.03
    assert won["transcript"].startswith("# workfunc transcript v1")
    assert workfunc.play_otp(0.5, 1000, 42)["result"] == "lost_challenge_failed"
    assert workfunc.play_otp(0.6, 10, 42, budget=0)["result"] == "lost_budget_depleted"
    assert math.isclose(workfunc.otp_oracle(0.5), 0.5)

    c = workfunc.toy_encrypt(20, 0x2A5, 0x12345678)
    assert workfunc.toy_decrypt(20, 0x2A5, c) == 0x12345678
    try:
        workfunc.toy_encrypt(8, 256, 0)
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-range key accepted")

    passed, report = workfunc.validate(quick=True)
    assert passed, report

    print("workfunc smoke test ok")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Regenerates the quarter-wave sine table (Q1.30, 1024 entries over [0, pi/2)).

Writes tests/fixtures/sine_q1_30.txt and include/chaosrand/detail/sine_table.hpp.
Values are sin(i * pi / 2048) * 2^30 rounded to nearest (ties to even), computed
with 50-digit arithmetic.
"""
import pathlib
import mpmath

mpmath.mp.dps = 50
ROOT = pathlib.Path(__file__).resolve().parent.parent

values = []
for i in range(1024):
    v = mpmath.sin(i * mpmath.pi / 2048) * (1 << 30)
    fl = int(mpmath.floor(v))
    rem = v - fl
    if rem > mpmath.mpf("0.5") or (rem == mpmath.mpf("0.5") and fl % 2 == 1):
        fl += 1
    values.append(fl)

(ROOT / "tests/fixtures/sine_q1_30.txt").write_text("".join(f"{v}\n" for v in values))

rows = []
for i in range(0, 1024, 8):
    rows.append("    " + ", ".join(str(v) for v in values[i:i + 8]) + ",")
header = """// Generated by tools/gen_sine_table.py. Do not edit.
#pragma once

#include <array>
#include <cstdint>

namespace chaosrand::detail {

// sin(i * pi / 2048) in Q1.30, i = 0..1023.
inline constexpr std::array<std::int32_t, 1024> kSineTable = {
%s
};

}  // namespace chaosrand::detail
""" % "\n".join(rows)
(ROOT / "include/chaosrand/detail/sine_table.hpp").write_text(header)

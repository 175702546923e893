#pragma once

namespace regionet {

// Compensated accumulator; keeps billion-second duration totals stable.
struct KahanSum {
    double sum = 0.0;
    double c = 0.0;

    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }

    double value() const { return sum; }
};

} // namespace regionet

#include "impulse/trig_series.hpp"

#include <cmath>

namespace impulse {

double TrigSeries::operator()(double x) const {
    double v = mean;
    for (const auto& m : modes) v += m.amp * std::sin(m.freq * x + m.phase);
    return v;
}

double TrigSeries::integral(double x) const {
    double v = mean * x;
    for (const auto& m : modes) {
        if (m.freq == 0.0) {
            v += m.amp * std::sin(m.phase) * x;
        } else {
            v -= m.amp / m.freq * (std::cos(m.freq * x + m.phase) - std::cos(m.phase));
        }
    }
    return v;
}

double TrigSeries::derivative(double x) const {
    double v = 0.0;
    for (const auto& m : modes) v += m.amp * m.freq * std::cos(m.freq * x + m.phase);
    return v;
}

double TrigSeries::sup_abs() const {
    double s = std::abs(mean);
    for (const auto& m : modes) s += std::abs(m.amp);
    return s;
}

double TrigSeries::lipschitz() const {
    double s = 0.0;
    for (const auto& m : modes) s += std::abs(m.amp * m.freq);
    return s;
}

}  // namespace impulse

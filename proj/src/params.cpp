#include "kerrosc/params.hpp"
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kerrosc {

double ModelParams::f_crit() const
{
    if (!(delta > 0) || !(alpha > 0))
        throw std::invalid_argument("f_crit requires delta > 0 and alpha > 0");
    return std::sqrt(4 * delta * delta * delta / (27 * alpha));
}

double ModelParams::potential(double I) const
{
    double v = 0;
    for (const auto& [q, aq] : alpha_q)
        v += aq * std::pow(I, q);
    return v;
}

double ModelParams::potential_deriv(double I) const
{
    double v = 0;
    for (const auto& [q, aq] : alpha_q)
        v += aq * q * std::pow(I, q - 1);
    return v;
}

double ModelParams::potential_second(double I) const
{
    double v = 0;
    for (const auto& [q, aq] : alpha_q)
        v += aq * q * (q - 1) * std::pow(I, q - 2);
    return v;
}

bool ModelParams::has_potential() const
{
    for (const auto& [q, aq] : alpha_q)
        if (aq != 0)
            return true;
    return false;
}

int ModelParams::default_n_max() const
{
    if (!(delta > 0) || !(alpha > 0))
        return 16;
    return std::max(8, (int)std::ceil(4 * delta / alpha));
}

void ModelParams::validate() const
{
    if (!(alpha >= 0))
        throw std::invalid_argument("alpha must be >= 0");
    if (!(gamma >= 0))
        throw std::invalid_argument("gamma must be >= 0");
    if (!(n_thermal >= 0))
        throw std::invalid_argument("n_thermal must be >= 0");
    if (!(drive >= 0))
        throw std::invalid_argument("drive must be >= 0");
    for (const auto& [q, aq] : alpha_q) {
        if (q < 3)
            throw std::invalid_argument("alpha_q orders must satisfy q >= 3");
        if (!std::isfinite(aq))
            throw std::invalid_argument("alpha_q coefficients must be finite");
    }
}

ModelParams ModelParams::without_potential() const
{
    ModelParams p = *this;
    p.alpha_q.clear();
    return p;
}

std::string ModelParams::describe() const
{
    std::ostringstream os;
    os << "delta=" << delta << " alpha=" << alpha << " drive=" << drive << " gamma=" << gamma
       << " n_thermal=" << n_thermal;
    for (const auto& [q, aq] : alpha_q)
        os << " alpha_" << q << "=" << aq;
    return os.str();
}

} // namespace kerrosc

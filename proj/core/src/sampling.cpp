#include "kdl/sampling.hpp"

#include <array>

namespace kdl {

std::vector<double> lin_space(double lo, double hi, int count) {
    if (count < 1) throw PreconditionError("lin_space needs at least one point");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / (count - 1);
    for (int i = 0; i < count; ++i) out[i] = lo + step * i;
    out.back() = hi;
    return out;
}

std::vector<double> log_space(double lo, double hi, int count) {
    if (!(lo > 0.0) || !(hi >= lo)) throw PreconditionError("log_space needs 0 < lo <= hi");
    auto exps = lin_space(std::log(lo), std::log(hi), count);
    for (auto& e : exps) e = std::exp(e);
    exps.front() = lo;
    exps.back() = hi;
    return exps;
}

double radical_inverse(std::uint64_t index, int base) {
    double result = 0.0;
    double f = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= base;
    }
    return result;
}

std::vector<Eigen::VectorXd> halton_ball(int dim, int count, double radius, std::uint64_t offset) {
    static constexpr std::array<int, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    if (dim < 1 || dim > static_cast<int>(kPrimes.size())) {
        throw PreconditionError("halton_ball supports dimensions 1.." + std::to_string(kPrimes.size()));
    }
    std::vector<Eigen::VectorXd> out;
    out.reserve(count);
    std::uint64_t index = offset + 1;
    while (static_cast<int>(out.size()) < count) {
        Eigen::VectorXd p(dim);
        for (int d = 0; d < dim; ++d) p[d] = 2.0 * radical_inverse(index, kPrimes[d]) - 1.0;
        ++index;
        if (p.squaredNorm() <= 1.0) out.push_back(radius * p);
    }
    return out;
}

}  // namespace kdl

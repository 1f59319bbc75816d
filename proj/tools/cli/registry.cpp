#include "cli/registry.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "hessian/errors.hpp"
#include "hessian/smooth.hpp"

namespace cli {

using hessian::HermitianForm;
using hessian::Point;

namespace {

double abs2(const Point& p) { return p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]; }

// d^2 f(|z|^2) / dz_j dz_k-bar = f'(s) delta_jk + f''(s) conj(z_j) z_k
HermitianForm radial_form(const Point& p, int n, double d1, double d2) {
    HermitianForm H(n);
    for (int j = 0; j < n; ++j)
        for (int k = j; k < n; ++k) {
            const std::complex<double> zj(p[2 * j], p[2 * j + 1]), zk(p[2 * k], p[2 * k + 1]);
            std::complex<double> v = d2 * std::conj(zj) * zk;
            if (j == k) v += d1;
            H.set(j, k, v);
        }
    return H;
}

std::optional<HermitianForm> flat(const Point&, int n) { return HermitianForm(n); }

AnalyticFunction power_gamma(const std::string& label, double g) {
    AnalyticFunction f;
    f.name = "power-gamma-" + label;
    f.description = "min(|z|^{2 gamma}, 1) - 1 with gamma = " + label;
    f.value = [g](const Point& p) { return std::min(std::pow(abs2(p), g), 1.0) - 1.0; };
    f.hessian = [g](const Point& p, int n) -> std::optional<HermitianForm> {
        const double s = abs2(p);
        if (s == 0.0 || s == 1.0) return std::nullopt;
        if (s > 1.0) return HermitianForm(n);
        return radial_form(p, n, g * std::pow(s, g - 1.0), g * (g - 1.0) * std::pow(s, g - 2.0));
    };
    f.witness = hessian::HolderConstants{2.0 * g, 1.0};
    return f;
}

std::vector<AnalyticFunction> build() {
    std::vector<AnalyticFunction> out;
    {
        AnalyticFunction f;
        f.name = "quadratic";
        f.description = "|z|^2 - 1";
        f.value = [](const Point& p) { return abs2(p) - 1.0; };
        f.hessian = [](const Point&, int n) -> std::optional<HermitianForm> { return HermitianForm::identity(n); };
        f.witness = hessian::HolderConstants{1.0, 2.0};
        out.push_back(f);
    }
    {
        AnalyticFunction f;
        f.name = "zero";
        f.description = "0";
        f.value = [](const Point&) { return 0.0; };
        f.hessian = flat;
        f.witness = hessian::HolderConstants{1.0, 0.0};
        out.push_back(f);
    }
    out.push_back(power_gamma("1/8", 0.125));
    out.push_back(power_gamma("1/4", 0.25));
    out.push_back(power_gamma("1/2", 0.5));
    {
        AnalyticFunction f;
        f.name = "harmonic-wave";
        f.description = "Re(z1^2) = x1^2 - y1^2, pluriharmonic";
        f.value = [](const Point& p) { return p[0] * p[0] - p[1] * p[1]; };
        f.hessian = flat;
        f.witness = hessian::HolderConstants{1.0, 2.0};
        out.push_back(f);
    }
    {
        AnalyticFunction f;
        f.name = "radial-bump";
        f.description = "|z|^4 - |z|^2";
        f.value = [](const Point& p) { return abs2(p) * abs2(p) - abs2(p); };
        f.hessian = [](const Point& p, int n) -> std::optional<HermitianForm> {
            return radial_form(p, n, 2.0 * abs2(p) - 1.0, 2.0);
        };
        f.witness = hessian::HolderConstants{1.0, 2.0};
        out.push_back(f);
    }
    {
        AnalyticFunction f;
        f.name = "sqrt-profile";
        f.description = "-sqrt(max(0, 1 - |z|^2))";
        f.value = [](const Point& p) { return -std::sqrt(std::max(0.0, 1.0 - abs2(p))); };
        f.hessian = [](const Point& p, int n) -> std::optional<HermitianForm> {
            const double s = abs2(p);
            if (s >= 1.0) return std::nullopt;
            return radial_form(p, n, 0.5 / std::sqrt(1.0 - s), 0.25 * std::pow(1.0 - s, -1.5));
        };
        f.witness = hessian::HolderConstants{0.5, std::sqrt(2.0)};
        out.push_back(f);
    }
    {
        AnalyticFunction f;
        f.name = "holder-wave";
        f.description = "0.3 sqrt(|x1|)";
        f.value = [](const Point& p) { return 0.3 * std::sqrt(std::abs(p[0])); };
        f.hessian = [](const Point&, int) -> std::optional<HermitianForm> { return std::nullopt; };
        f.witness = hessian::HolderConstants{0.5, 0.3};
        out.push_back(f);
    }
    {
        AnalyticFunction f;
        f.name = "constant-one";
        f.description = "1";
        f.value = [](const Point&) { return 1.0; };
        f.hessian = flat;
        f.witness = hessian::HolderConstants{1.0, 0.0};
        out.push_back(f);
    }
    {
        AnalyticFunction f;
        f.name = "min-quadratic";
        f.description = "min(0, |z|^2 - 1/4)";
        f.value = [](const Point& p) { return std::min(0.0, abs2(p) - 0.25); };
        f.hessian = [](const Point& p, int n) -> std::optional<HermitianForm> {
            const double s = abs2(p);
            if (s == 0.25) return std::nullopt;
            return s < 0.25 ? HermitianForm::identity(n) : HermitianForm(n);
        };
        f.witness = hessian::HolderConstants{1.0, 2.0};
        out.push_back(f);
    }
    for (const auto& f : out)
        for (int n : {1, 2})
            if (witness_ratio(f, n) > 1.0 + 1e-9)
                throw std::logic_error("registry: Hoelder witness of " + f.name + " fails on sampled pairs");
    return out;
}

constexpr const char* kExt = "ext:";

std::string base_name(const std::string& name) {
    return name.rfind(kExt, 0) == 0 ? name.substr(4) : name;
}

}  // namespace

const std::vector<AnalyticFunction>& registry_list() {
    static const std::vector<AnalyticFunction> catalog = build();
    return catalog;
}

bool registry_contains(const std::string& name) {
    const auto base = base_name(name);
    for (const auto& f : registry_list())
        if (f.name == base) return base == name || f.witness.has_value();
    return false;
}

const AnalyticFunction& registry_lookup(const std::string& name) {
    const auto base = base_name(name);
    for (const auto& f : registry_list())
        if (f.name == base) {
            if (base != name && !f.witness) throw hessian::ConfigError("function '" + base + "' has no Hoelder witness to extend with");
            return f;
        }
    throw hessian::ConfigError("unknown function '" + name + "'");
}

hessian::ScalarField registry_sample(const std::string& name, const hessian::DomainPtr& domain) {
    const auto& f = registry_lookup(name);
    auto u = hessian::ScalarField::sample(domain, f.value);
    if (base_name(name) != name) u = hessian::holder_extend(u, f.witness->alpha, f.witness->L);
    return u;
}

double witness_ratio(const AnalyticFunction& f, int n, int samples, std::uint64_t seed) {
    if (!f.witness) return 0.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const int dim = 2 * n;
    auto draw = [&] {
        Point p{};
        for (;;) {
            for (int a = 0; a < dim; ++a) p[static_cast<std::size_t>(a)] = unit(rng);
            if (abs2(p) <= 1.0) return p;
        }
    };
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const Point a = draw();
        Point b = draw();
        // half of the pairs are close
        if (s % 2 == 1)
            for (int k = 0; k < dim; ++k) b[static_cast<std::size_t>(k)] = a[static_cast<std::size_t>(k)] + 1e-3 * b[static_cast<std::size_t>(k)];
        double d2 = 0.0;
        for (int k = 0; k < dim; ++k) d2 += (a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]) * (a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]);
        if (d2 == 0.0) continue;
        const double diff = std::abs(f.value(a) - f.value(b));
        const double bound = f.witness->L * std::pow(std::sqrt(d2), f.witness->alpha);
        if (bound == 0.0) {
            if (diff > 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        worst = std::max(worst, diff / bound);
    }
    return worst;
}

}  // namespace cli

// SPDX-License-Identifier: MIT
#include "pirlab/capacity.hpp"

#include <cmath>

#include "pirlab/error.hpp"

namespace pirlab {

namespace {

Rational q(std::size_t a, std::size_t b) { return make_rational(static_cast<long long>(a), static_cast<long long>(b)); }

// (1 + r + ... + r^{K-1})^{-1}
Rational geometric_inverse(const Rational& r, std::size_t k) {
    Rational sum = 0, term = 1;
    for (std::size_t i = 0; i < k; ++i) {
        sum += term;
        term *= r;
    }
    return 1 / sum;
}

}  // namespace

CapacityKind parse_capacity_kind(const std::string& name) {
    if (name == "pir") return CapacityKind::Pir;
    if (name == "tpir") return CapacityKind::Tpir;
    if (name == "mds-pir") return CapacityKind::MdsPir;
    if (name == "fghk" || name == "fghk-conjecture") return CapacityKind::FghkConjecture;
    if (name == "theorem3") return CapacityKind::Theorem3;
    throw Error(Errc::BadParams, "unknown capacity kind " + name);
}

const char* capacity_kind_name(CapacityKind k) {
    switch (k) {
        case CapacityKind::Pir: return "pir";
        case CapacityKind::Tpir: return "tpir";
        case CapacityKind::MdsPir: return "mds-pir";
        case CapacityKind::FghkConjecture: return "fghk";
        case CapacityKind::Theorem3: return "theorem3";
    }
    return "?";
}

Rational capacity_formula(CapacityKind kind, const CapacityParams& prm) {
    if (prm.k < 1 || prm.n < 1) throw Error(Errc::BadParams, "need K >= 1 and N >= 1");
    switch (kind) {
        case CapacityKind::Pir: return geometric_inverse(q(1, prm.n), prm.k);
        case CapacityKind::Tpir:
            if (prm.t < 1 || prm.t > prm.n) throw Error(Errc::BadParams, "tpir needs 1 <= T <= N");
            return geometric_inverse(q(prm.t, prm.n), prm.k);
        case CapacityKind::MdsPir:
            if (prm.k_c < 1 || prm.k_c > prm.n) throw Error(Errc::BadParams, "mds-pir needs 1 <= K_c <= N");
            return geometric_inverse(q(prm.k_c, prm.n), prm.k);
        case CapacityKind::FghkConjecture:
            if (prm.t < 1 || prm.k_c < 1 || prm.t + prm.k_c - 1 > prm.n)
                throw Error(Errc::BadParams, "conjecture needs T + K_c - 1 <= N");
            return geometric_inverse(q(prm.t + prm.k_c - 1, prm.n), prm.k);
        case CapacityKind::Theorem3: {
            const std::size_t n = prm.n, t = prm.t;
            if (prm.k != 2 || n < 2 || t < 1 || t > n) throw Error(Errc::BadParams, "theorem3 needs K=2, 1 <= T <= N");
            if (t == n) return q(1, 2);
            return q(n * n - n, 2 * n * n - 3 * n + t);
        }
    }
    throw Error(Errc::BadParams, "unknown capacity kind");
}

std::vector<Rational> outer_bound_2422_series(std::size_t kmax) {
    std::vector<Rational> out;
    if (kmax < 1) return out;
    out.push_back(1);
    Rational pw = 1;  // (2/3)^{K-1}
    for (std::size_t k = 2; k <= kmax; ++k) {
        pw *= q(2, 3);
        out.push_back(1 / (1 + q(3, 8) / out.back() + (1 - pw) * q(3, 4)));
    }
    return out;
}

Rational outer_bound_2422_family(std::size_t k) {
    if (k < 1) throw Error(Errc::BadParams, "K >= 1");
    return outer_bound_2422_series(k).back();
}

std::vector<Rational> outer_bound_general_series(std::size_t kmax, std::size_t n, std::size_t t, std::size_t k_c) {
    if (n < 1 || t > n || k_c < 1 || n >= t + k_c) throw Error(Errc::BadParams, "outer bound needs N < T + K_c");
    std::vector<Rational> out;
    if (kmax < 1) return out;
    out.push_back(1);
    const Rational a = q(n - t, n), b = 1 - q(n - t, k_c);
    for (std::size_t k = 2; k <= kmax; ++k) out.push_back(1 / (1 + a / out.back() + static_cast<long long>(k - 1) * b));
    return out;
}

Rational outer_bound_general(std::size_t k, std::size_t n, std::size_t t, std::size_t k_c) {
    if (k < 1) throw Error(Errc::BadParams, "K >= 1");
    return outer_bound_general_series(k, n, t, k_c).back();
}

std::vector<FourCase> four_case_table() {
    std::vector<FourCase> out;
    CapacityParams a{2, 4, 2, 3}, b{2, 4, 3, 2}, c{2, 4, 1, 3}, d{2, 4, 3, 1};
    out.push_back({a, "theorem3", capacity_formula(CapacityKind::Theorem3, a)});
    out.push_back({b, "outer-bound-general", outer_bound_general(2, 4, 3, 2)});
    out.push_back({c, "mds-pir", capacity_formula(CapacityKind::MdsPir, c)});
    out.push_back({d, "tpir", capacity_formula(CapacityKind::Tpir, d)});
    return out;
}

LimitReport limit_2422(std::size_t kmax, double tol) {
    LimitReport rep;
    rep.limit = q(5, 14);
    const auto series = outer_bound_2422_series(kmax);
    for (std::size_t i = 0; i < series.size(); ++i) {
        rep.distance = std::fabs(to_double(series[i] - rep.limit));
        if (rep.distance < tol) {
            rep.k = i + 1;
            break;
        }
    }
    return rep;
}

LimitReport limit_general(std::size_t n, std::size_t t, std::size_t k_c, std::size_t kmax, double tol) {
    if (n < 1 || t > n || k_c < 1 || n >= t + k_c) throw Error(Errc::BadParams, "outer bound needs N < T + K_c");
    LimitReport rep;
    rep.limit = q(t * k_c, n * (k_c + t - n));
    // Same recursion in doubles: exact denominators grow without bound at large K.
    const double a = static_cast<double>(n - t) / static_cast<double>(n);
    const double b = 1.0 - static_cast<double>(n - t) / static_cast<double>(k_c);
    const double lim = to_double(rep.limit);
    double c = 1;
    for (std::size_t k = 1; k <= kmax; ++k) {
        if (k > 1) c = 1 / (1 + a / c + static_cast<double>(k - 1) * b);
        rep.distance = std::fabs(static_cast<double>(k) * c - lim);
        if (rep.distance < tol) {
            rep.k = k;
            break;
        }
    }
    return rep;
}

}  // namespace pirlab

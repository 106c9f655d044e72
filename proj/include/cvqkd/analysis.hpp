// Copyright 2026 The cvqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Closed-form analysis of the measure-and-sift key distribution protocol on a
// symmetric 1 x 1 mode Gaussian state in standard form
//
//        [ l   0   cx  0  ]
//        [ 0   l   0  -cp ]
//        [ cx  0   l   0  ]
//        [ 0  -cp  0   l  ]
//
// Alice and Bob homodyne the x quadrature, Eve holds the purification.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>

#include "cvqkd/gaussian.hpp"

namespace cvqkd {

enum class Attack { individual, coherent };

inline std::string_view to_string(Attack a) {
    return a == Attack::individual ? "individual" : "coherent";
}

/// Threshold below which a and b (hence Eve's coupling) count as zero.
inline constexpr double kPureTol = 1e-12;

/// Returns the violated inequality, or nothing when (lambda, cx, cp) is an
/// ordered physical standard form.
inline std::optional<std::string> standard_form_violation(double lambda, double cx, double cp,
                                                          double tol = kPhysicalTol) {
    if (!std::isfinite(lambda) || !std::isfinite(cx) || !std::isfinite(cp))
        return "parameters must be finite";
    if (!(lambda > 0.0)) return "lambda > 0";
    if (!(cp >= 0.0)) return "cp >= 0";
    if (!(cx >= cp)) return "cx >= cp";
    // Squared symplectic eigenvalues; the second is never below the first when cx >= cp.
    if ((lambda - cx) * (lambda + cp) < 1.0 - tol) return "(lambda - cx)(lambda + cp) >= 1";
    if ((lambda - cp) * (lambda + cx) < 1.0 - tol) return "(lambda - cp)(lambda + cx) >= 1";
    return std::nullopt;
}

class StdSymmetricState {
   public:
    StdSymmetricState(double lambda, double cx, double cp) : lambda_(lambda), cx_(cx), cp_(cp) {
        if (auto violation = standard_form_violation(lambda, cx, cp))
            throw DomainError("standard form violates " + *violation);
    }

    /// Two-mode squeezed vacuum with squeezing parameter r.
    static StdSymmetricState two_mode_squeezed(double r) {
        const double s = std::sinh(2.0 * r);
        return StdSymmetricState(std::cosh(2.0 * r), s, s);
    }

    double lambda() const { return lambda_; }
    double cx() const { return cx_; }
    double cp() const { return cp_; }

    CovarianceMatrix cm() const {
        Matrix g = Matrix::Zero(4, 4);
        g(0, 0) = g(1, 1) = g(2, 2) = g(3, 3) = lambda_;
        g(0, 2) = g(2, 0) = cx_;
        g(1, 3) = g(3, 1) = -cp_;
        return CovarianceMatrix(std::move(g));
    }

    PartitionedState partitioned() const { return PartitionedState(cm(), {0}); }

    /// (lambda - cx)(lambda - cp) < 1.
    bool nppt() const { return (lambda_ - cx_) * (lambda_ - cp_) < 1.0; }

    /// lambda - (lambda + cx)(lambda - cx)(lambda - cp) > 0.
    bool coherent_securable() const {
        return nppt() && lambda_ - (lambda_ * lambda_ - cx_ * cx_) * (lambda_ - cp_) > 0.0;
    }

    double purity() const {
        return 1.0 / std::sqrt((lambda_ * lambda_ - cx_ * cx_) * (lambda_ * lambda_ - cp_ * cp_));
    }

    /// log2(1 / sqrt((lambda - cx)(lambda - cp))), or 0 for PPT states.
    double log_negativity() const {
        return nppt() ? -0.5 * std::log2((lambda_ - cx_) * (lambda_ - cp_)) : 0.0;
    }

   private:
    double lambda_;
    double cx_;
    double cp_;
};

namespace detail {

inline void require_finite_correlation(const StdSymmetricState& s, const char* op) {
    if (!(s.lambda() > s.cx())) throw DomainError(std::string(op) + ": requires lambda > cx");
}

// lambda^2 - cx^2
inline double x_block_det(const StdSymmetricState& s) {
    return s.lambda() * s.lambda() - s.cx() * s.cx();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Outcome probabilities

/// 4 sigma^2 / (sqrt((l + s^2)^2 - cx^2) sqrt((l s^2 + 1)^2 - cp^2 s^4)).
inline double coincidence_prefactor(const StdSymmetricState& s, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
    const double l = s.lambda(), s2 = sigma * sigma;
    const double dx = (l + s2) * (l + s2) - s.cx() * s.cx();
    const double dp = (l * s2 + 1.0) * (l * s2 + 1.0) - s.cp() * s.cp() * s2 * s2;
    if (!(dx > 0.0) || !(dp > 0.0)) throw DomainError("degenerate coincidence denominator");
    return 4.0 * s2 / (std::sqrt(dx) * std::sqrt(dp));
}

namespace detail {

inline double finite_width_prob(const StdSymmetricState& s, double x0a, double x0b, double sigma,
                                double sign) {
    const double k = coincidence_prefactor(s, sigma);
    const double a = s.lambda() + sigma * sigma;
    const double denom = a * a - s.cx() * s.cx();
    const double ax = std::abs(x0a), bx = std::abs(x0b);
    return k * std::exp((sign * 2.0 * ax * bx * s.cx() - a * (x0a * x0a + x0b * x0b)) / denom);
}

}  // namespace detail

/// p(0,0) = p(1,1): overlap with a product of width-sigma Gaussians at +|x0a|, +|x0b|.
inline double coincidence_prob(const StdSymmetricState& s, double x0a, double x0b, double sigma) {
    return detail::finite_width_prob(s, x0a, x0b, sigma, +1.0);
}

/// p(0,1) = p(1,0).
inline double anticoincidence_prob(const StdSymmetricState& s, double x0a, double x0b,
                                   double sigma) {
    return detail::finite_width_prob(s, x0a, x0b, sigma, -1.0);
}

/// Sift error in the sharp-measurement limit,
/// 1 / (1 + exp(4 cx |x0a||x0b| / (lambda^2 - cx^2))).
inline double error_rate(const StdSymmetricState& s, double x0a, double x0b) {
    detail::require_finite_correlation(s, "error_rate");
    const double z = 4.0 * s.cx() * std::abs(x0a) * std::abs(x0b) / detail::x_block_det(s);
    return 1.0 / (1.0 + std::exp(z));
}

/// Joint density of the two x outcomes: bivariate normal, covariance gamma_x / 2.
inline double xx_marginal(const StdSymmetricState& s, double x0a, double x0b) {
    detail::require_finite_correlation(s, "xx_marginal");
    const double det = detail::x_block_det(s);
    return std::exp((2.0 * s.cx() * x0a * x0b - s.lambda() * (x0a * x0a + x0b * x0b)) / det) /
           (std::numbers::pi * std::sqrt(det));
}

// ---------------------------------------------------------------------------
// Eve

struct EveIngredients {
    double a;       // lambda^2 - cx cp - 1
    double b;       // lambda (cx - cp)
    double x;       // (sqrt(a+b) + sqrt(a-b)) / 2
    double y;       // (sqrt(a+b) - sqrt(a-b)) / 2
    double a_coef;  // sqrt(a+b) / (lambda + cx)
    double b_coef;  // sqrt(a-b) / (lambda - cx); 0 when lambda == cx
};

inline EveIngredients eve_ingredients(const StdSymmetricState& s) {
    const double l = s.lambda(), cx = s.cx(), cp = s.cp();
    EveIngredients e{};
    e.a = l * l - cx * cp - 1.0;
    e.b = l * (cx - cp);
    double plus = e.a + e.b, minus = e.a - e.b;
    if (plus < -kPureTol || minus < -kPureTol)
        throw DomainError("eve_ingredients: a +/- b < 0, state is not physical");
    plus = std::max(plus, 0.0);
    minus = std::max(minus, 0.0);
    const double rp = std::sqrt(plus), rm = std::sqrt(minus);
    e.x = 0.5 * (rp + rm);
    e.y = 0.5 * (rp - rm);
    e.a_coef = rp / (l + cx);
    e.b_coef = l > cx ? rm / (l - cx) : 0.0;
    return e;
}

/// Eve's pure conditional states after Alice and Bob find (+|x0a|, +|x0b|)
/// and (-|x0a|, -|x0b|). Quadratures are interleaved (x1, p1, x2, p2); in
/// block ordering (x1, x2, p1, p2) the CM is diag(gamma_x, gamma_x^{-1}).
struct EveConditionalState {
    CovarianceMatrix cm;
    DisplacementVector dv_plus;
    DisplacementVector dv_minus;

    GaussianState plus() const { return GaussianState(cm, dv_plus); }
    GaussianState minus() const { return GaussianState(cm, dv_minus); }
};

/// Gaussian conditioning of purify(gamma_AB) on homodyne x outcomes. The mean
/// shift of Eve's momenta is -(A dx - B Dx, A dx + B Dx) / 2 with
/// Dx = |x0b| - |x0a| and dx = |x0b| + |x0a|.
inline EveConditionalState eve_conditional(const StdSymmetricState& s, double x0a, double x0b) {
    detail::require_finite_correlation(s, "eve_conditional");
    const EveIngredients e = eve_ingredients(s);
    const double l = s.lambda(), cx = s.cx();
    const double det = detail::x_block_det(s);

    Matrix g = Matrix::Zero(4, 4);
    // x block gamma_x on (x1, x2) = indices (0, 2); p block gamma_x^{-1} on (1, 3).
    g(0, 0) = g(2, 2) = l;
    g(0, 2) = g(2, 0) = cx;
    g(1, 1) = g(3, 3) = l / det;
    g(1, 3) = g(3, 1) = -cx / det;

    const double diff = std::abs(x0b) - std::abs(x0a);
    const double sum = std::abs(x0b) + std::abs(x0a);
    Vector d = Vector::Zero(4);
    d(1) = -0.5 * (e.a_coef * sum - e.b_coef * diff);
    d(3) = -0.5 * (e.a_coef * sum + e.b_coef * diff);
    return EveConditionalState{CovarianceMatrix(std::move(g)), DisplacementVector(d),
                               DisplacementVector(-d)};
}

/// |<e++|e-->|, the positive root of
/// exp(-4/(l^2-cx^2) [ (x0a^2+x0b^2)/2 (l^2-cx^2-1) l + |x0a||x0b| (cx - cp(l^2-cx^2)) ]).
inline double eve_overlap(const StdSymmetricState& s, double x0a, double x0b) {
    detail::require_finite_correlation(s, "eve_overlap");
    const double l = s.lambda(), k = detail::x_block_det(s);
    const double bracket = 0.5 * (x0a * x0a + x0b * x0b) * (k - 1.0) * l +
                           std::abs(x0a) * std::abs(x0b) * (s.cx() - s.cp() * k);
    return std::exp(-2.0 * bracket / k);
}

// ---------------------------------------------------------------------------
// Security conditions

/// Negative iff eps/(1-eps) < |<e++|e-->| (secure against individual attacks).
inline double security_lhs(const StdSymmetricState& s, double x0a, double x0b) {
    const double l = s.lambda(), k = l * l - s.cx() * s.cx();
    return 0.5 * (x0a * x0a + x0b * x0b) * (k - 1.0) * l +
           std::abs(x0a) * std::abs(x0b) * (-s.cx() - s.cp() * k);
}

/// Negative iff eps/(1-eps) < |<e++|e-->|^2 (finite coherent attacks).
inline double coherent_security_lhs(const StdSymmetricState& s, double x0a, double x0b) {
    const double l = s.lambda(), k = l * l - s.cx() * s.cx();
    return 0.5 * (x0a * x0a + x0b * x0b) * (k - 1.0) * l -
           std::abs(x0a) * std::abs(x0b) * s.cp() * k;
}

namespace detail {

inline bool effectively_pure(const StdSymmetricState& s) {
    const EveIngredients e = eve_ingredients(s);
    return std::abs(e.a) < kPureTol && std::abs(e.b) < kPureTol;
}

}  // namespace detail

/// Window parameter for individual attacks:
/// ((cx - l)/(cx + l)) (1 - (l + cx)(l + cp)) / (1 - (l - cx)(l - cp)).
/// Exactly 1 for pure states, > 1 for mixed NPPT states.
inline double alpha(const StdSymmetricState& s) {
    const double l = s.lambda(), cx = s.cx(), cp = s.cp();
    const double denom = 1.0 - (l - cx) * (l - cp);
    if (!(denom > 0.0)) throw DomainError("alpha: state is PPT, no secure window exists");
    if (detail::effectively_pure(s)) return 1.0;
    return ((cx - l) / (cx + l)) * (1.0 - (l + cx) * (l + cp)) / denom;
}

/// Window parameter for finite coherent attacks,
/// (P + cp K) / (cp K - P) with K = l^2 - cx^2 and P = l (K - 1).
/// The denominator equals l - (l + cx)(l - cx)(l - cp) and must be positive.
inline double beta(const StdSymmetricState& s) {
    const double l = s.lambda(), cx = s.cx(), cp = s.cp();
    if (!s.nppt()) throw DomainError("beta: state is PPT, no secure window exists");
    const double k = l * l - cx * cx;
    const double denom = l - k * (l - cp);
    if (!(denom > 0.0))
        throw NotCoherentSecurable("beta: lambda - (lambda + cx)(lambda - cx)(lambda - cp) <= 0");
    if (detail::effectively_pure(s)) return 1.0;
    const double p = l * (k - 1.0);
    return (p + cp * k) / denom;
}

struct SecurityReport {
    Attack attack = Attack::individual;
    bool nppt = false;
    bool coherent_ok = false;
    std::optional<double> alpha;
    std::optional<double> beta;
    double x0a = 0.0;
    // Accepted |x0b| - |x0a| lies in [lo_unit, hi_unit] * x0a, i.e. [lo, hi].
    double lo_unit = 0.0;
    double hi_unit = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double d_length = 0.0;
};

/// Relative window bounds [-2/(sqrt g + 1), 2/(sqrt g - 1)] for g = alpha or beta;
/// g = 1 gives [-1, +inf).
inline std::pair<double, double> window_units(double g) {
    if (g <= 1.0) return {-1.0, std::numeric_limits<double>::infinity()};
    const double r = std::sqrt(g);
    return {-2.0 / (r + 1.0), 2.0 / (r - 1.0)};
}

inline double window_parameter(const StdSymmetricState& s, Attack attack) {
    return attack == Attack::individual ? alpha(s) : beta(s);
}

inline SecurityReport accept_interval(const StdSymmetricState& s, double x0a, Attack attack) {
    if (!(x0a > 0.0)) throw DomainError("accept_interval: x0a must be positive");
    SecurityReport r;
    r.attack = attack;
    r.nppt = s.nppt();
    r.coherent_ok = s.coherent_securable();
    if (!r.nppt) throw DomainError("accept_interval: state is PPT, no secure window exists");
    r.alpha = alpha(s);
    if (r.coherent_ok) r.beta = beta(s);
    if (attack == Attack::coherent && !r.coherent_ok)
        throw NotCoherentSecurable(
            "accept_interval: lambda - (lambda + cx)(lambda - cx)(lambda - cp) <= 0");

    const double g = attack == Attack::individual ? *r.alpha : *r.beta;
    r.x0a = x0a;
    std::tie(r.lo_unit, r.hi_unit) = window_units(g);
    r.lo = r.lo_unit * x0a;
    r.hi = r.hi_unit * x0a;
    r.d_length =
        g <= 1.0 ? std::numeric_limits<double>::infinity() : 4.0 * std::sqrt(g) / (g - 1.0) * x0a;
    return r;
}

/// Everything the `analyze` command prints about a state.
struct StateSummary {
    double lambda = 0.0, cx = 0.0, cp = 0.0;
    bool physical = false;
    bool nppt = false;
    bool coherent_ok = false;
    double purity = 0.0;
    double log_negativity = 0.0;
    std::optional<double> alpha;
    std::optional<double> beta;
};

inline StateSummary summarize(const StdSymmetricState& s) {
    StateSummary out;
    out.lambda = s.lambda();
    out.cx = s.cx();
    out.cp = s.cp();
    out.physical = is_physical(s.cm());
    out.nppt = s.nppt();
    out.coherent_ok = s.coherent_securable();
    out.purity = s.purity();
    out.log_negativity = s.log_negativity();
    if (out.nppt) out.alpha = alpha(s);
    if (out.coherent_ok) out.beta = beta(s);
    return out;
}

}  // namespace cvqkd

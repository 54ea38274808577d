//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file ltube/wienerhopf.hpp
//! Minimal solutions of W(s) = g(s) + int_{-inf}^s W(s - y) f(y) dy.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"
#include "sampling.hpp"
#include "walk.hpp"

namespace ltube
{
//---------------------------------------------------------------------------//
// STEP LAWS AND INHOMOGENEITIES
//---------------------------------------------------------------------------//
/*!
 * Law of one step, described by the functions product integration needs.
 *
 * \c partial_mean(x) is the integral of y f(y) over (-inf, x]. \c sf must be
 * accurate in the far right tail and \c cdf in the far left tail.
 */
struct StepLaw
{
    std::string name;
    std::function<double(double)> density;
    std::function<double(double)> cdf;
    std::function<double(double)> sf;
    std::function<double(double)> partial_mean;
};

//! The 2D strip step, all in closed form
inline StepLaw step_law_2d()
{
    return {"2d", step_pdf_2d, step_cdf_2d, step_sf_2d, step_partial_mean_2d};
}

/*!
 * Step law from a symmetric density, tabulated by quadrature.
 *
 * CDF and partial mean are accumulated on [-x_max, x_max] with Gauss-Kronrod
 * cells; the mass outside is split evenly between the two tails and treated
 * as sitting at +-x_max. Between table nodes the integrals are completed
 * with one more quadrature call, so the result is smooth.
 */
inline StepLaw symmetric_step_law(std::string name,
                                  std::function<double(double)> density,
                                  double x_max,
                                  std::size_t n_cells = 4000)
{
    expect(x_max > 0 && n_cells >= 2, "symmetric_step_law: bad table");
    struct Table
    {
        std::function<double(double)> f;
        std::vector<double> x, c, m;
        double tail{0};
    };
    auto tab = std::make_shared<Table>();
    tab->f = std::move(density);
    tab->x.resize(n_cells + 1);
    tab->c.resize(n_cells + 1);
    tab->m.resize(n_cells + 1);
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    for (std::size_t i = 0; i <= n_cells; ++i)
        tab->x[i] = -x_max + 2 * x_max * static_cast<double>(i)
                                 / static_cast<double>(n_cells);
    for (std::size_t i = 0; i < n_cells; ++i)
    {
        double const a = tab->x[i], b = tab->x[i + 1];
        tab->c[i + 1] = tab->c[i] + GK::integrate(tab->f, a, b, 8, 1e-13);
        tab->m[i + 1] = tab->m[i]
                        + GK::integrate([&](double y) { return y * tab->f(y); },
                                        a, b, 8, 1e-13);
    }
    tab->tail = std::max(0.0, (1 - tab->c.back()) / 2);

    auto inner = [tab](double x, bool moment) {
        auto it = std::upper_bound(tab->x.begin(), tab->x.end(), x);
        std::size_t i = static_cast<std::size_t>(it - tab->x.begin()) - 1;
        i = std::min(i, tab->x.size() - 2);
        double base = moment ? tab->m[i] : tab->c[i];
        if (moment)
            base += GK::integrate([&](double y) { return y * tab->f(y); },
                                  tab->x[i], x, 8, 1e-13);
        else
            base += GK::integrate(tab->f, tab->x[i], x, 8, 1e-13);
        return base;
    };
    double const xm = x_max;
    StepLaw law;
    law.name = std::move(name);
    law.density = [tab](double x) { return tab->f(x); };
    law.cdf = [tab, inner, xm](double x) {
        if (x < -xm)
            return 0.0;
        if (x >= xm)
            return 1.0;
        return tab->tail + inner(x, false);
    };
    law.sf = [tab, inner, xm](double x) {
        if (x < -xm)
            return 1.0;
        if (x >= xm)
            return 0.0;
        if (x >= 0)
            return tab->tail + (tab->c.back() - inner(x, false));
        return 1 - tab->tail - inner(x, false);
    };
    law.partial_mean = [tab, inner, xm](double x) {
        double const left = -xm * tab->tail;
        if (x < -xm)
            return 0.0;
        if (x >= xm)
            return left + tab->m.back() + xm * tab->tail;
        return left + inner(x, true);
    };
    return law;
}

//! Inhomogeneous term g(s) for s >= 0
struct Inhomogeneity
{
    std::string name;
    std::function<double(double)> g;
};

//! g(s) = P(X > s/t): its minimal solution is u(s, t)
inline Inhomogeneity kernel_u2d(double t)
{
    expect(t > 0 && t <= 1, "kernel u2d: t must lie in (0, 1]");
    return {"u2d", [t](double s) { return step_sf_2d(s / t); }};
}

/*!
 * g(s) = P(X > s/t) - t^2 P(X > s): its minimal solution is u(s, t) - t^2.
 *
 * Evaluated from the cancellation-free tail form
 * P(X > x) = 1 / (2 h (h + x)) with h = sqrt(1 + x^2).
 */
inline Inhomogeneity kernel_u2d_centered(double t)
{
    expect(t > 0 && t <= 1, "kernel u2d-centered: t must lie in (0, 1]");
    return {"u2d-centered", [t](double s) {
                double const v = step_sf_2d(s / t) - t * t * step_sf_2d(s);
                return std::max(v, 0.0);
            }};
}

//! g(s) = c / (1 + s^{2 + alpha})
inline Inhomogeneity kernel_power_decay(double c, double alpha)
{
    return {"decay", [c, alpha](double s) {
                return c / (1 + std::pow(s, 2 + alpha));
            }};
}

inline Inhomogeneity kernel_zero()
{
    return {"zero", [](double) { return 0.0; }};
}

/*!
 * Tabulated g, linear between nodes and zero beyond the last node.
 */
inline Inhomogeneity kernel_tabulated(std::vector<double> s,
                                      std::vector<double> g)
{
    expect(s.size() == g.size() && s.size() >= 2,
           "tabulated kernel: need matching columns with two rows");
    expect(std::is_sorted(s.begin(), s.end()) && s.front() <= 0,
           "tabulated kernel: s must increase from 0");
    for (double v : g)
        expect(v >= 0 && std::isfinite(v), "tabulated kernel: g must be >= 0");
    return {"tabulated", [s = std::move(s), g = std::move(g)](double x) {
                if (x > s.back())
                    return 0.0;
                auto it = std::upper_bound(s.begin(), s.end(), x);
                std::size_t i = static_cast<std::size_t>(it - s.begin());
                if (i == 0)
                    return g.front();
                i = std::min(i, s.size() - 1);
                double const w = (x - s[i - 1]) / (s[i] - s[i - 1]);
                return g[i - 1] + std::clamp(w, 0.0, 1.0) * (g[i] - g[i - 1]);
            }};
}

//---------------------------------------------------------------------------//
// DISCRETIZATION
//---------------------------------------------------------------------------//
/*!
 * Nodes for the piecewise-polynomial representation of W.
 *
 * Uniform with step \c h on [0, uniform_until], then cells growing by the
 * factor 1 + growth * h up to far_factor * s_max. Halving \c h refines both
 * zones. Past the last node W is held constant.
 */
struct GridSpec
{
    double s_max{1000};
    double h{0.125};
    double uniform_until{16};
    double growth{0.16};
    double far_factor{1e4};
};

//! Interpolation of W between nodes inside the convolution
enum class Quadrature
{
    linear,  //!< hat functions; all weights >= 0, so iterates are monotone
    quadratic  //!< averaged three-point Lagrange stencils; third order
};

inline std::vector<double> make_nodes(GridSpec const& spec)
{
    expect(spec.s_max > 0 && spec.h > 0, "grid: need s_max > 0 and h > 0");
    expect(spec.far_factor >= 1, "grid: far_factor must be >= 1");
    double const uni = std::min(spec.uniform_until, spec.s_max);
    double const r_max = spec.far_factor * spec.s_max;
    std::vector<double> r;
    auto const n_uni = static_cast<std::size_t>(std::ceil(uni / spec.h - 1e-9));
    for (std::size_t i = 0; i <= n_uni; ++i)
        r.push_back(spec.h * static_cast<double>(i));
    double const q = 1 + spec.growth * spec.h;
    double dx = spec.h;
    while (r.back() < r_max)
    {
        dx *= q;
        r.push_back(std::min(r.back() + dx, r_max));
    }
    return r;
}

//! Problem: step law, inhomogeneity, grid
struct WienerHopfProblem
{
    StepLaw law;
    Inhomogeneity g;
    GridSpec grid;
    Quadrature scheme{Quadrature::quadratic};
};

namespace detail
{
//! Moments of f over a cell, taken about the point c
struct CellMoments
{
    double m0{0};
    double m1{0};
    double m2{0};
};

/*!
 * Integrate f, (y - c) f and (y - c)^2 f over [a, b].
 *
 * The cell is cut into pieces no wider than a quarter of their distance
 * from the origin (and at most 1/4 near it), so a fixed 15-point
 * Gauss-Kronrod rule resolves the unit-scale peak of the step density even
 * inside a wide far-field cell.
 */
inline CellMoments
cell_moments(std::function<double(double)> const& f, double a, double b, double c)
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    auto const& x = GK::abscissa();
    auto const& w = GK::weights();
    CellMoments out;
    double lo = a;
    while (lo < b)
    {
        double const hi = std::min(b, lo + 0.25 * std::max(1.0, std::abs(lo)));
        double const mid = (lo + hi) / 2, half = (hi - lo) / 2;
        auto add = [&](double y, double wt) {
            double const fy = f(y) * wt * half;
            double const d = y - c;
            out.m0 += fy;
            out.m1 += fy * d;
            out.m2 += fy * d * d;
        };
        add(mid, w[0]);
        for (std::size_t k = 1; k < x.size(); ++k)
        {
            add(mid - half * x[k], w[k]);
            add(mid + half * x[k], w[k]);
        }
        lo = hi;
    }
    return out;
}

//! Exact hat-function weights from the CDF and partial mean
inline Eigen::MatrixXd
build_operator_linear(StepLaw const& law, std::vector<double> const& r)
{
    std::size_t const n = r.size();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    std::vector<double> fb(n), mb(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        double const s = r[i];
        // Probability mass of y in [a, b], accurate in both tails
        auto mass = [&](double a, double b, double cdf_a, double cdf_b) {
            if (a >= 0)
                return law.sf(a) - law.sf(b);
            return cdf_b - cdf_a;
        };
        for (std::size_t j = 0; j < n; ++j)
        {
            fb[j] = law.cdf(s - r[j]);
            mb[j] = law.partial_mean(s - r[j]);
        }
        for (std::size_t j = 0; j + 1 < n; ++j)
        {
            double const a = s - r[j + 1], b = s - r[j];
            double const width = r[j + 1] - r[j];
            double const a0 = mass(a, b, fb[j + 1], fb[j]);
            double const m1 = mb[j] - mb[j + 1];
            double const w_hi = std::max(0.0, (b * a0 - m1) / width);
            double const w_lo = std::max(0.0, (m1 - a * a0) / width);
            k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1))
                += w_hi;
            k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                += w_lo;
        }
        k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n - 1))
            += fb[n - 1];
    }
    return k;
}


/*!
 * Quadratic weights: on each cell W is the mean of the two three-point
 * Lagrange interpolants through the neighbouring nodes (one-sided at the
 * ends), integrated against f by \c cell_moments.
 */
inline Eigen::MatrixXd
build_operator_quadratic(StepLaw const& law, std::vector<double> const& r)
{
    std::size_t const n = r.size();
    expect(n >= 3, "quadratic scheme needs at least three nodes");
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
    {
        auto const row = static_cast<Eigen::Index>(i);
        double const s = r[i];
        for (std::size_t j = 0; j + 1 < n; ++j)
        {
            // Cell [r_j, r_j+1] in z = s - y; moments about its centre zc
            double const zc = (r[j] + r[j + 1]) / 2;
            CellMoments const m
                = cell_moments(law.density, s - r[j + 1], s - r[j], s - zc);
            // With tau = y - (s - zc), z - zc = -tau and
            // (z - z_q)(z - z_r) = tau^2 + (d_q + d_r) tau + d_q d_r.
            auto stencil = [&](std::size_t first, double weight) {
                for (std::size_t a = 0; a < 3; ++a)
                {
                    double const dp = r[first + a] - zc;
                    double const dq = r[first + (a + 1) % 3] - zc;
                    double const dr = r[first + (a + 2) % 3] - zc;
                    double const num = m.m2 + (dq + dr) * m.m1 + dq * dr * m.m0;
                    k(row, static_cast<Eigen::Index>(first + a))
                        += weight * num / ((dp - dq) * (dp - dr));
                }
            };
            bool const left = j >= 1;
            bool const right = j + 2 < n;
            if (left && right)
            {
                stencil(j - 1, 0.5);
                stencil(j, 0.5);
            }
            else
            {
                stencil(left ? j - 1 : j, 1.0);
            }
        }
        k(row, static_cast<Eigen::Index>(n - 1)) += law.cdf(s - r[n - 1]);
    }
    return k;
}
}  // namespace detail

/*!
 * Discrete operator K with (K W)(r_i) = int W(r_i - y) f(y) dy, y <= r_i.
 *
 * Mass landing beyond the last node is charged to it. The linear scheme is
 * exact for piecewise-linear W; the quadratic one has some negative weights
 * but is far more accurate on the stretched cells, where the recurrent walk
 * otherwise accumulates interpolation error over its many visits.
 */
inline Eigen::MatrixXd build_operator(StepLaw const& law,
                                      std::vector<double> const& r,
                                      Quadrature scheme = Quadrature::quadratic)
{
    if (scheme == Quadrature::linear)
        return detail::build_operator_linear(law, r);
    return detail::build_operator_quadratic(law, r);
}

//---------------------------------------------------------------------------//
// SOLUTIONS
//---------------------------------------------------------------------------//
/*!
 * Minimal solution on the nodes plus diagnostics.
 *
 * \c iterations counts Neumann terms, i.e. sweeps of W <- g + K W from zero.
 * \c residual is the sup of |g + K W - W| over nodes in [0, s_max].
 */
struct WienerHopfSolution
{
    std::vector<double> nodes;
    std::vector<double> values;
    std::uint64_t iterations{0};
    double residual{0};
    double last_increment{0};
    double truncation_error_bound{0};
    std::string kernel;

    //! Piecewise-linear evaluation
    double operator()(double s) const
    {
        if (s <= nodes.front())
            return values.front();
        if (s >= nodes.back())
            return values.back();
        auto it = std::upper_bound(nodes.begin(), nodes.end(), s);
        std::size_t const i = static_cast<std::size_t>(it - nodes.begin()) - 1;
        double const w = (s - nodes[i]) / (nodes[i + 1] - nodes[i]);
        return values[i] + w * (values[i + 1] - values[i]);
    }

    //! Values on a uniform output grid 0, h, ..., s_max
    std::vector<std::pair<double, double>> sample(double s_max, double h) const
    {
        std::vector<std::pair<double, double>> out;
        auto const n = static_cast<std::size_t>(std::floor(s_max / h + 1e-9));
        for (std::size_t i = 0; i <= n; ++i)
        {
            double const s = h * static_cast<double>(i);
            out.emplace_back(s, (*this)(s));
        }
        return out;
    }
};

//! Solver choices
struct IterationOptions
{
    double tol{1e-6};
    std::uint64_t max_iter{std::uint64_t{1} << 62};
    //! Plain sweeps (true) or sweeps evaluated in doubling blocks (false)
    bool plain_sweeps{false};
    //! Called after each plain sweep with (k, W^k); used to check monotonicity
    std::function<void(std::uint64_t, Eigen::VectorXd const&)> on_sweep;
};

namespace detail
{
inline std::size_t count_reported(std::vector<double> const& r, double s_max)
{
    return static_cast<std::size_t>(
        std::upper_bound(r.begin(), r.end(), s_max * (1 + 1e-12)) - r.begin());
}
}  // namespace detail

/*!
 * Minimal solution by iteration from W = 0.
 *
 * The k-th iterate is the partial Neumann sum sum_{j<k} K^j g. With plain
 * sweeps each iterate is formed explicitly. Otherwise the same iterates are
 * visited at k = 1, 2, 4, ... using W_{2k} = W_k + K^k W_k and
 * K^{2k} = (K^k)^2, which reaches the slow tail of a recurrent walk in
 * logarithmically many matrix products. Both variants stop when the last
 * increment is below \c tol on [0, s_max]. Under the linear scheme every
 * increment is >= 0, so the iterates rise monotonically to the minimum.
 */
inline WienerHopfSolution solve_min_iterative(WienerHopfProblem const& prob,
                                              IterationOptions const& opt = {})
{
    expect(opt.tol > 0, "solve_min_iterative: tol must be positive");
    auto const r = make_nodes(prob.grid);
    std::size_t const n = r.size();
    std::size_t const n_rep = detail::count_reported(r, prob.grid.s_max);
    Eigen::VectorXd g(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
    {
        double const v = prob.g.g(r[i]);
        expect(v >= 0 && std::isfinite(v), "inhomogeneity must be finite and >= 0");
        g(static_cast<Eigen::Index>(i)) = v;
    }
    Eigen::MatrixXd const k = build_operator(prob.law, r, prob.scheme);

    auto sup_head = [n_rep](Eigen::VectorXd const& v) {
        return v.head(static_cast<Eigen::Index>(n_rep)).cwiseAbs().maxCoeff();
    };

    WienerHopfSolution sol;
    sol.kernel = prob.g.name;
    sol.nodes = r;
    Eigen::VectorXd w = g;
    std::uint64_t iters = 1;
    double inc = sup_head(g);
    if (opt.plain_sweeps)
    {
        if (opt.on_sweep)
            opt.on_sweep(iters, w);
        while (inc >= opt.tol && iters < opt.max_iter)
        {
            Eigen::VectorXd next = g + k * w;
            inc = sup_head(next - w);
            w = std::move(next);
            ++iters;
            if (opt.on_sweep)
                opt.on_sweep(iters, w);
        }
    }
    else
    {
        Eigen::MatrixXd p = k;
        while (inc >= opt.tol && iters < opt.max_iter)
        {
            Eigen::VectorXd const d = p * w;
            inc = sup_head(d);
            w += d;
            iters *= 2;
            if (inc < opt.tol || iters >= opt.max_iter)
                break;
            p = (p * p).eval();
        }
    }
    sol.iterations = iters;
    sol.last_increment = inc;
    sol.values.assign(w.data(), w.data() + n);
    Eigen::VectorXd const defect = g + k * w - w;
    sol.residual = sup_head(defect);
    sol.truncation_error_bound
        = w.maxCoeff() * prob.law.cdf(prob.grid.s_max - r.back());
    if (inc >= opt.tol)
    {
        throw NonConvergence("solve_min_iterative: increment "
                             + std::to_string(inc) + " after "
                             + std::to_string(iters) + " sweeps");
    }
    if (sol.truncation_error_bound > opt.tol)
    {
        throw TruncationDominates(
            "solve_min_iterative: far-field bound "
            + std::to_string(sol.truncation_error_bound) + " exceeds tol");
    }
    return sol;
}

/*!
 * Solve (I - K) W = g by LU; a cross-check for moderate far fields.
 */
inline WienerHopfSolution solve_min_direct(WienerHopfProblem const& prob)
{
    auto const r = make_nodes(prob.grid);
    std::size_t const n = r.size();
    Eigen::VectorXd g(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        g(static_cast<Eigen::Index>(i)) = prob.g.g(r[i]);
    Eigen::MatrixXd const k = build_operator(prob.law, r, prob.scheme);
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(k.rows(), k.cols()) - k;
    Eigen::VectorXd w = a.partialPivLu().solve(g);
    WienerHopfSolution sol;
    sol.kernel = prob.g.name;
    sol.nodes = r;
    sol.values.assign(w.data(), w.data() + n);
    sol.residual = (g + k * w - w).cwiseAbs().maxCoeff();
    return sol;
}

//---------------------------------------------------------------------------//
// RENEWAL REPRESENTATION
//---------------------------------------------------------------------------//
namespace detail
{
//! Two-point Gauss-Legendre nodes on [a, b]
inline std::pair<double, double> gauss2(double a, double b)
{
    double const c = (a + b) / 2, h = (b - a) / 2;
    double const d = h / std::sqrt(3.0);
    return {c - d, c + d};
}
}  // namespace detail

/*!
 * G(x) = int g(x - y) U-(dy) over y <= 0, where \c minus estimates the
 * image of U- under y -> -y (the ascending measure of the negated walk).
 */
inline double renewal_inner(std::function<double(double)> const& g,
                            RenewalMeasureEstimate const& minus,
                            double x)
{
    double total = minus.atom_at_zero * g(x);
    for (std::size_t b = 0; b < minus.mass.size(); ++b)
    {
        if (minus.mass[b] == 0)
            continue;
        auto const [p, q] = detail::gauss2(minus.bin_edges[b],
                                           minus.bin_edges[b + 1]);
        total += minus.mass[b] * (g(x + p) + g(x + q)) / 2;
    }
    return total;
}

/*!
 * Minimal solution W(s) = int_[0, s] G(s - x) U+(dx) on \c s_grid.
 *
 * Mass within a bin is taken as uniform; G is tabulated on a grid of half
 * the finest bin width and interpolated linearly.
 */
inline std::vector<double>
solve_via_renewal(Inhomogeneity const& g,
                  RenewalMeasureEstimate const& plus,
                  RenewalMeasureEstimate const& minus,
                  std::vector<double> const& s_grid)
{
    expect(!s_grid.empty(), "solve_via_renewal: empty grid");
    double const s_max = *std::max_element(s_grid.begin(), s_grid.end());
    if (s_max > plus.window_max() * (1 + 1e-12))
    {
        throw WindowTooSmall("solve_via_renewal: s_max "
                             + std::to_string(s_max)
                             + " exceeds the renewal window "
                             + std::to_string(plus.window_max()));
    }
    double width = plus.window_max();
    for (std::size_t b = 0; b + 1 < plus.bin_edges.size(); ++b)
        width = std::min(width, plus.bin_edges[b + 1] - plus.bin_edges[b]);
    double const dx = width / 2;
    auto const n_tab = static_cast<std::size_t>(std::ceil(s_max / dx)) + 1;
    std::vector<double> gtab(n_tab + 1);
    for (std::size_t i = 0; i <= n_tab; ++i)
        gtab[i] = renewal_inner(g.g, minus, dx * static_cast<double>(i));
    auto big_g = [&](double x) {
        double const u = std::max(0.0, x) / dx;
        auto i = static_cast<std::size_t>(u);
        if (i >= n_tab)
            return gtab[n_tab];
        double const w = u - static_cast<double>(i);
        return gtab[i] + w * (gtab[i + 1] - gtab[i]);
    };

    std::vector<double> out(s_grid.size());
    for (std::size_t k = 0; k < s_grid.size(); ++k)
    {
        double const s = s_grid[k];
        double total = plus.atom_at_zero * big_g(s);
        for (std::size_t b = 0; b < plus.mass.size(); ++b)
        {
            double const lo = plus.bin_edges[b];
            if (lo > s)
                break;
            if (plus.mass[b] == 0)
                continue;
            double const hi = plus.bin_edges[b + 1];
            double const top = std::min(hi, s);
            double const frac = (top - lo) / (hi - lo);
            auto const [p, q] = detail::gauss2(lo, top);
            total += plus.mass[b] * frac * (big_g(s - p) + big_g(s - q)) / 2;
        }
        out[k] = total;
    }
    return out;
}

/*!
 * P(Z+ >= t) = int P(X > t - y) U-(dy) over y <= 0.
 */
inline double ladder_tail_from_renewal(std::function<double(double)> const& sf,
                                       RenewalMeasureEstimate const& minus,
                                       double t)
{
    return renewal_inner(sf, minus, t);
}

//---------------------------------------------------------------------------//
}  // namespace ltube

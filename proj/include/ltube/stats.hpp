//------------------------------- -*- C++ -*- -------------------------------//
// Copyright ltube contributors: see top-level LICENSE file for details
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file ltube/stats.hpp
//! Empirical distributions, KS statistics, confidence summaries.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace ltube
{
//---------------------------------------------------------------------------//
/*!
 * Sum with a fixed binary tree shape.
 *
 * The result depends only on the input order, never on how the input was
 * produced, which keeps reductions bit-stable across worker counts.
 */
inline double pairwise_sum(std::span<double const> x)
{
    if (x.size() <= 8)
    {
        double s = 0;
        for (double v : x)
            s += v;
        return s;
    }
    std::size_t const half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

inline double mean(std::span<double const> x)
{
    expect(!x.empty(), "mean of empty sample");
    return pairwise_sum(x) / static_cast<double>(x.size());
}

//! Unbiased sample variance (two-pass)
inline double variance(std::span<double const> x)
{
    expect(x.size() >= 2, "variance needs two samples");
    double const m = mean(x);
    std::vector<double> sq(x.size());
    std::transform(x.begin(), x.end(), sq.begin(), [m](double v) {
        return (v - m) * (v - m);
    });
    return pairwise_sum(sq) / static_cast<double>(x.size() - 1);
}

//---------------------------------------------------------------------------//
// NORMAL AND KOLMOGOROV DISTRIBUTIONS
//---------------------------------------------------------------------------//
inline double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

//! Standard normal quantile by bisection on erfc (accurate to ~1e-15)
inline double normal_quantile(double p)
{
    expect(p > 0 && p < 1, "normal quantile needs p in (0, 1)");
    double lo = -40, hi = 40;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i)
    {
        double const mid = (lo + hi) / 2;
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
}

//! Two-sided z for a confidence level, e.g. 0.95 -> 1.96
inline double two_sided_z(double level)
{
    return normal_quantile(0.5 + level / 2);
}

/*!
 * Kolmogorov survival function Q(lambda) = P(K > lambda).
 */
inline double kolmogorov_sf(double lambda)
{
    if (lambda < 0.2)
        return 1;
    double sum = 0;
    for (int k = 1; k <= 100; ++k)
    {
        double const term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? term : -term);
        if (term < 1e-18)
            break;
    }
    return std::clamp(2 * sum, 0.0, 1.0);
}

//! Asymptotic one-sample KS p-value with the Stephens small-n correction
inline double ks_pvalue(double distance, std::size_t n)
{
    double const rn = std::sqrt(static_cast<double>(n));
    return kolmogorov_sf((rn + 0.12 + 0.11 / rn) * distance);
}

//! Asymptotic KS critical distance at significance alpha
inline double ks_critical(std::size_t n, double alpha = 0.01)
{
    return std::sqrt(-0.5 * std::log(alpha / 2))
           / std::sqrt(static_cast<double>(n));
}

//---------------------------------------------------------------------------//
/*!
 * Right-continuous empirical CDF.
 */
class EmpiricalCDF
{
  public:
    EmpiricalCDF() = default;

    explicit EmpiricalCDF(std::vector<double> sample) : x_{std::move(sample)}
    {
        std::sort(x_.begin(), x_.end());
    }

    std::size_t size() const { return x_.size(); }
    std::vector<double> const& sorted() const { return x_; }

    double operator()(double t) const
    {
        if (x_.empty())
            return 0;
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        return static_cast<double>(it - x_.begin())
               / static_cast<double>(x_.size());
    }

    //! Lower empirical quantile
    double quantile(double p) const
    {
        expect(!x_.empty(), "quantile of empty sample");
        auto k = static_cast<std::size_t>(
            std::ceil(p * static_cast<double>(x_.size())));
        k = std::clamp<std::size_t>(k, 1, x_.size());
        return x_[k - 1];
    }

    double median() const { return quantile(0.5); }

  private:
    std::vector<double> x_;
};

/*!
 * Sup distance between an ECDF and a continuous reference CDF.
 *
 * Both the value at each sample point and its left limit are compared.
 */
template<class F>
inline double ks_distance(EmpiricalCDF const& ecdf, F&& reference_cdf)
{
    expect(ecdf.size() >= 1, "KS distance needs a nonempty sample");
    auto const& x = ecdf.sorted();
    double const n = static_cast<double>(x.size());
    double d = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        double const f = reference_cdf(x[i]);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    return d;
}

inline double uniform01_cdf(double x)
{
    return std::clamp(x, 0.0, 1.0);
}

//---------------------------------------------------------------------------//
/*!
 * Point estimate with standard error and a two-sided interval.
 */
struct ConfidenceSummary
{
    double estimate{0};
    double std_error{0};
    double lower{0};
    double upper{0};
    std::size_t n{0};
    double level{0.95};
};

//! Mean with CLT interval
inline ConfidenceSummary mean_summary(std::span<double const> x,
                                      double level = 0.95)
{
    ConfidenceSummary s;
    s.n = x.size();
    s.level = level;
    s.estimate = mean(x);
    s.std_error = x.size() >= 2
                      ? std::sqrt(variance(x) / static_cast<double>(x.size()))
                      : 0.0;
    double const z = two_sided_z(level);
    s.lower = s.estimate - z * s.std_error;
    s.upper = s.estimate + z * s.std_error;
    return s;
}

//! Proportion with normal-approximation standard error
inline ConfidenceSummary proportion_summary(std::uint64_t k,
                                            std::uint64_t n,
                                            double level = 0.95)
{
    expect(n > 0, "proportion of empty sample");
    ConfidenceSummary s;
    s.n = n;
    s.level = level;
    double const p = static_cast<double>(k) / static_cast<double>(n);
    s.estimate = p;
    s.std_error = std::sqrt(p * (1 - p) / static_cast<double>(n));
    double const z = two_sided_z(level);
    s.lower = p - z * s.std_error;
    s.upper = p + z * s.std_error;
    return s;
}

//---------------------------------------------------------------------------//
struct BinomialTest
{
    double p_hat{0};
    double z{0};
    double p_value{1};
};

//! Two-sided normal-approximation binomial test with continuity correction
inline BinomialTest binomial_test(std::uint64_t k, std::uint64_t n, double p0)
{
    expect(n > 0 && p0 > 0 && p0 < 1, "binomial test arguments");
    double const nn = static_cast<double>(n);
    double const mu = nn * p0;
    double const sd = std::sqrt(nn * p0 * (1 - p0));
    double const dev = std::max(
        0.0, std::abs(static_cast<double>(k) - mu) - 0.5);
    BinomialTest t;
    t.p_hat = static_cast<double>(k) / nn;
    t.z = dev / sd;
    t.p_value = 2 * (1 - normal_cdf(t.z));
    return t;
}

//---------------------------------------------------------------------------//
/*!
 * Ratio of means with delta-method standard error and percentile bootstrap
 * interval. Bootstrap resampling uses its own seeded stream so results are
 * reproducible.
 */
inline ConfidenceSummary ratio_estimator_ci(std::span<double const> num,
                                            std::span<double const> den,
                                            double level = 0.95,
                                            int n_bootstrap = 400,
                                            std::uint64_t seed = 0x5eed)
{
    expect(num.size() == den.size() && !num.empty(),
           "ratio estimator needs paired samples");
    double const mn = mean(num);
    double const md = mean(den);
    if (!(md > 0))
    {
        throw DegenerateDenominator{};
    }
    std::size_t const n = num.size();
    double const ratio = mn / md;

    ConfidenceSummary s;
    s.n = n;
    s.level = level;
    s.estimate = ratio;

    // Delta method: residuals num - ratio * den
    std::vector<double> resid(n);
    for (std::size_t i = 0; i < n; ++i)
        resid[i] = num[i] - ratio * den[i];
    s.std_error = n >= 2 ? std::sqrt(variance(resid) / static_cast<double>(n))
                               / md
                         : 0.0;

    if (n_bootstrap <= 0 || n < 2)
    {
        double const z = two_sided_z(level);
        s.lower = ratio - z * s.std_error;
        s.upper = ratio + z * s.std_error;
        return s;
    }

    Xoshiro256pp rng{seed, 0};
    std::vector<double> reps;
    reps.reserve(static_cast<std::size_t>(n_bootstrap));
    std::vector<double> bn(n), bd(n);
    for (int b = 0; b < n_bootstrap; ++b)
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            auto j = static_cast<std::size_t>(generate_open_unit(rng)
                                              * static_cast<double>(n));
            j = std::min(j, n - 1);
            bn[i] = num[j];
            bd[i] = den[j];
        }
        double const d = mean(bd);
        if (d > 0)
            reps.push_back(mean(bn) / d);
    }
    EmpiricalCDF boot{std::move(reps)};
    double const alpha = 1 - level;
    s.lower = std::min(ratio, boot.quantile(alpha / 2));
    s.upper = std::max(ratio, boot.quantile(1 - alpha / 2));
    return s;
}

//---------------------------------------------------------------------------//
/*!
 * Integer-count histogram on fixed edges, with half-open bins [a, b).
 *
 * Counts are integers so merging partial histograms in any order gives the
 * same result as binning the concatenated sample.
 */
class Histogram
{
  public:
    Histogram() = default;

    explicit Histogram(std::vector<double> edges)
        : edges_{std::move(edges)}, counts_(edges_.size() - 1, 0)
    {
        expect(edges_.size() >= 2
                   && std::is_sorted(edges_.begin(), edges_.end()),
               "histogram edges must be increasing");
    }

    static Histogram uniform(double lo, double hi, std::size_t n_bins)
    {
        std::vector<double> e(n_bins + 1);
        for (std::size_t i = 0; i <= n_bins; ++i)
            e[i] = lo + (hi - lo) * static_cast<double>(i)
                            / static_cast<double>(n_bins);
        return Histogram{std::move(e)};
    }

    static Histogram log_spaced(double lo, double hi, std::size_t n_bins)
    {
        expect(lo > 0 && hi > lo, "log bins need 0 < lo < hi");
        std::vector<double> e(n_bins + 1);
        double const ratio = std::log(hi / lo);
        for (std::size_t i = 0; i <= n_bins; ++i)
            e[i] = lo * std::exp(ratio * static_cast<double>(i)
                                 / static_cast<double>(n_bins));
        e.front() = lo;
        e.back() = hi;
        return Histogram{std::move(e)};
    }

    //! Bin index, or -1 below / size() at or above the range
    std::ptrdiff_t find(double x) const
    {
        if (x < edges_.front())
            return -1;
        if (!(x < edges_.back()))
            return static_cast<std::ptrdiff_t>(counts_.size());
        auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
        return (it - edges_.begin()) - 1;
    }

    void add(double x, std::uint64_t weight = 1)
    {
        auto i = this->find(x);
        if (i < 0)
            underflow_ += weight;
        else if (static_cast<std::size_t>(i) >= counts_.size())
            overflow_ += weight;
        else
            counts_[static_cast<std::size_t>(i)] += weight;
    }

    void merge(Histogram const& other)
    {
        expect(other.edges_ == edges_, "merging histograms with other edges");
        for (std::size_t i = 0; i < counts_.size(); ++i)
            counts_[i] += other.counts_[i];
        underflow_ += other.underflow_;
        overflow_ += other.overflow_;
    }

    std::vector<double> const& edges() const { return edges_; }
    std::vector<std::uint64_t> const& counts() const { return counts_; }
    std::size_t size() const { return counts_.size(); }
    std::uint64_t underflow() const { return underflow_; }
    std::uint64_t overflow() const { return overflow_; }

    std::uint64_t total() const
    {
        std::uint64_t t = underflow_ + overflow_;
        for (auto c : counts_)
            t += c;
        return t;
    }

  private:
    std::vector<double> edges_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t underflow_{0};
    std::uint64_t overflow_{0};
};

//---------------------------------------------------------------------------//
}  // namespace ltube

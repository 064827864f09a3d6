// Acceptance criteria 1-12. Prints one PASS / FAIL / SKIP line per criterion;
// exits nonzero when any criterion fails.

#include "afm/acvf.hpp"
#include "afm/asymptotic_covariance.hpp"
#include "afm/forecast.hpp"
#include "afm/gw_test.hpp"
#include "afm/irf.hpp"
#include "afm/simulate.hpp"
#include "afm/spectral.hpp"
#include "afm/whittle.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

using namespace afm;
using afm_test::kPi;
using afm_test::vec;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status = Status::fail;
    std::string detail;
};

Outcome verdict(bool ok, const std::string& detail) { return {ok ? Status::pass : Status::fail, detail}; }

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// Reference ARFIMA fits of the TreeRing series.
std::vector<ArfimaModel> treering_models() {
    return {ArfimaModel::fractional_noise(0.195), ArfimaModel(0.146, vec({0.072}), Eigen::VectorXd()),
            ArfimaModel(0.156, Eigen::VectorXd(), vec({0.059})), ArfimaModel(0.106, vec({0.397}), vec({-0.285}))};
}

Outcome fisher_constant() {
    double worst = 0.0;
    for (double d : {-0.4, 0.0, 0.2, 0.45}) {
        worst = std::max(worst, std::abs(fisher_matrix(ArfimaModel::fractional_noise(d)).info(0, 0) - kPi * kPi / 6.0));
    }
    return verdict(worst < 1e-8, fmt("max |Sigma_dd - pi^2/6| = %.2e", worst));
}

Outcome exact_se() {
    const double se = exact_stderr(ArfimaModel::fractional_noise(0.195), 1164)(0);
    return verdict(std::abs(se - 0.0229) <= 0.0005, fmt("SE(d) at n = 1164: %.5f (target 0.0229 +- 0.0005)", se));
}

Outcome treering_fit(const afm_test::Dataset& data) {
    if (!data.values) return {Status::skip, data.reason};
    const TimeSeries s(*data.values);
    const FitReport arma = whittle_fit(s, 1, 1);
    const FitReport fn = whittle_fit(s, 0, 0);
    const double sd = std::sqrt(arma.model.sigma2());
    const bool ok = std::abs(arma.model.d() - 0.1058) <= 0.02 && std::abs(arma.model.ar()(0) - 0.3966) <= 0.02 &&
                    std::abs(arma.model.ma()(0) + 0.2849) <= 0.02 && std::abs(sd - 35.073) <= 0.5 &&
                    fn.model.d() >= 0.185 && fn.model.d() <= 0.205;
    return verdict(ok, fmt("(1,d,1): d %.4f phi %.4f theta %.4f sd %.3f; (0,d,0): d %.4f", arma.model.d(),
                           arma.model.ar()(0), arma.model.ma()(0), sd, fn.model.d()));
}

Outcome aic_ranking(const afm_test::Dataset& data) {
    if (!data.values) return {Status::skip, data.reason};
    const auto rows = model_selection(TimeSeries(*data.values), 2, 2);
    std::set<std::pair<int, int>> top;
    std::ostringstream order;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i < 4) top.insert({rows[i].p, rows[i].q});
        order << (i ? " " : "") << "(" << rows[i].p << "," << rows[i].q << ")";
    }
    const std::set<std::pair<int, int>> expected{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    const bool ok = rows.size() == 9 && rows[0].p == 0 && rows[0].q == 0 && top == expected;
    return verdict(ok, "AIC order " + order.str());
}

Outcome sowell_quadrature() {
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> arma = {
        {vec({0.5}), Eigen::VectorXd()},
        {Eigen::VectorXd(), vec({-0.4})},
        {vec({-0.6}), vec({0.3})},
        {afm_test::coefficients_from_roots({std::polar(1.5, 1.0), std::polar(1.5, -1.0)}, true), vec({0.2})},
    };
    double worst = 0.0;
    for (double d : {-0.4, -0.1, 0.2, 0.45}) {
        for (const auto& [ar, ma] : arma) {
            const ArfimaModel m(d, ar, ma);
            const Eigen::VectorXd g = acvf_sowell(m, 50).gamma;
            for (int h = 0; h <= 50; ++h) {
                const double ref = afm_test::acvf_quadrature(d, ar, ma, 1.0, h);
                worst = std::max(worst, std::abs(g(h) - ref) / g(0));
            }
        }
    }
    return verdict(worst < 1e-6, fmt("16 models, max_h<=50 |gamma - quadrature| / gamma(0) = %.2e", worst));
}

Outcome closed_forms() {
    double acvf_gap = 0.0, irf_gap = 0.0;
    for (double d : {-0.45, -0.2, 0.1, 0.3, 0.45}) {
        const Eigen::VectorXd g = acvf_sowell(ArfimaModel::fractional_noise(d), 200).gamma;
        for (Eigen::Index h = 0; h <= 200; ++h) {
            const double ref = acvf_fd(d, 1.0, h);
            acvf_gap = std::max(acvf_gap, std::abs(g(h) - ref) / std::abs(ref));
        }
        const Eigen::VectorXd r = irf_exact(ArfimaModel::fractional_noise(d), 100);
        for (int j = 0; j <= 100; ++j) {
            const double ref = afm_test::gamma_ratio(2.0 * d, j);
            irf_gap = std::max(irf_gap, std::abs(r(j) - ref) / std::max(1.0, std::abs(ref)));
        }
    }
    return verdict(acvf_gap < 1e-12 && irf_gap < 1e-10,
                   fmt("acvf rel gap %.2e, irf gap %.2e", acvf_gap, irf_gap));
}

Outcome asymptotic_consistency() {
    bool ok = true;
    std::ostringstream detail;
    for (double d : {0.1, 0.3, 0.45}) {
        const double ratio = acvf_asymptotic(ArfimaModel::fractional_noise(d), 10000) / acvf_fd(d, 1.0, 10000);
        ok = ok && ratio >= 0.99 && ratio <= 1.01;
        detail << fmt("acvf(d=%.2f) %.5f ", d, ratio);
    }
    for (const ArfimaModel& m : treering_models()) {
        const IrfResult r = impulse_response(m, 150);
        const double ratio = r.asymptotic(150) / r.exact(150);
        ok = ok && ratio >= 0.95 && ratio <= 1.05;
        detail << fmt("irf(d=%.3f) %.5f ", m.d(), ratio);
    }
    return verdict(ok, detail.str());
}

Outcome calibration() {
    bool ok = true;
    std::ostringstream detail;
    WhittleOptions options;
    options.compute_residuals = false;
    for (double d : {-0.6, -0.3, 0.0, 0.25, 0.45}) {
        const ArfimaModel truth = ArfimaModel::fractional_noise(d);
        Eigen::VectorXd est(20);
        for (int rep = 0; rep < 20; ++rep) {
            est(rep) = whittle_fit(simulate(truth, 1000, 50000 + 100 * static_cast<std::uint64_t>(rep) +
                                                              static_cast<std::uint64_t>(std::lround((d + 1.0) * 10))),
                                   0, 0, {}, options)
                           .model.d();
        }
        const double mean = est.mean();
        const double sd = std::sqrt((est.array() - mean).square().sum() / 19.0);
        const double se = exact_stderr(truth, 1000)(0);
        const bool row = std::abs(mean - d) <= 0.05 && sd >= se / 2.0 && sd <= 2.0 * se;
        ok = ok && row;
        detail << fmt("d=%.2f mean %.4f sd %.4f (se %.4f)%s; ", d, mean, sd, se, row ? "" : " X");
    }
    return verdict(ok, detail.str());
}

Outcome gw_size() {
    std::mt19937_64 rng(20240);
    std::normal_distribution<double> normal;
    auto draw = [&](Eigen::Index n) {
        Eigen::VectorXd e(n);
        for (Eigen::Index t = 0; t < n; ++t) e(t) = normal(rng);
        return e;
    };
    const Eigen::VectorXd y = Eigen::VectorXd::Zero(200);
    int one = 0, three = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        if (gw_test(draw(200), draw(200), y, 1).p_value < 0.05) ++one;
        // Three-step forecast errors are MA(2).
        const Eigen::VectorXd ex = draw(202), ez = draw(202);
        const Eigen::VectorXd xs = ex.tail(200) + 0.5 * ex.segment(1, 200) + 0.25 * ex.head(200);
        const Eigen::VectorXd zs = ez.tail(200) + 0.5 * ez.segment(1, 200) + 0.25 * ez.head(200);
        if (gw_test(xs, zs, y, 3, HacMethod::newey_west).p_value < 0.05) ++three;
    }
    const bool ok = one >= 30 && one <= 70 && three >= 30 && three <= 70;
    return verdict(ok, fmt("rejection rate tau=1 %.1f%%, tau=3 (Newey-West) %.1f%%, MC se 0.69 points", one / 10.0, three / 10.0));
}

Outcome rolling_significance(const afm_test::Dataset& data) {
    if (!data.values) return {Status::skip, data.reason};
    const TimeSeries s(*data.values);
    std::ostringstream detail;
    bool ok = true;
    for (int tau : {2, 5}) {
        // The 40 targets are observations 1125..1164; window 0 ends tau steps before the first.
        const Eigen::Index origin = 1124 - tau;
        const ForecastSet model = rolling_forecasts(s, ForecastModelSpec::arfima(1, 1), origin, tau, 40);
        const ForecastSet bench = rolling_forecasts(s, ForecastModelSpec::random_walk(), origin, tau, 40);
        for (HacMethod method : {HacMethod::hac, HacMethod::newey_west}) {
            const GwReport r = gw_test(bench.predictions, model.predictions, model.target, tau, method);
            const bool row = tau == 2 ? r.p_value < 0.05 : r.p_value > 0.05;
            ok = ok && row && model.missing == 0;
            detail << fmt("tau=%d %s p=%.4f; ", tau, to_string(method).c_str(), r.p_value);
        }
    }
    return verdict(ok, detail.str());
}

Outcome simulation_fidelity() {
    const ArfimaModel fn = ArfimaModel::fractional_noise(0.3);
    const Eigen::Index n = 100000;
    const Eigen::VectorXd y = simulate_path(fn, n, 11);
    const Eigen::VectorXd gamma = acvf_sowell(fn, n).gamma;
    bool ok = true;
    std::ostringstream detail;
    for (Eigen::Index k : {1, 5, 20}) {
        const double r = y.head(n - k).dot(y.tail(n - k)) / y.squaredNorm();
        const afm_test::AcfMoments m = afm_test::acf_moments(gamma, n, k);
        const double z = (r - m.mean) / std::sqrt(m.variance);
        ok = ok && std::abs(z) < 3.0;
        detail << fmt("lag %ld z=%.2f; ", static_cast<long>(k), z);
    }
    const double ratio = sample_mean_variance(fn, n, true) / sample_mean_variance(fn, n, false);
    ok = ok && std::abs(ratio - 1.0) < 0.05;
    detail << fmt("smv exact/asymptotic %.6f", ratio);
    return verdict(ok, detail.str());
}

Outcome gradient_checks() {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> freq(0.01, kPi - 0.01);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const ArfimaModel m = afm_test::random_model(rng);
        const Eigen::VectorXd x = m.parameters();
        for (int f = 0; f < 10; ++f) {
            const double lambda = freq(rng);
            const Eigen::VectorXd g = grad_log_spectrum(m, lambda);
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                const double h = 1e-6;
                Eigen::VectorXd up = x, down = x;
                up(i) += h;
                down(i) -= h;
                auto logf = [&](const Eigen::VectorXd& v) {
                    return std::log(spectral_density(ArfimaModel::from_parameters(v, m.p()), lambda));
                };
                const double fd = (logf(up) - logf(down)) / (2.0 * h);
                worst = std::max(worst, std::abs(g(i) - fd) / std::max(1.0, std::abs(fd)));
            }
        }
    }
    return verdict(worst < 1e-5, fmt("max gradient error %.2e over 20 models x 10 frequencies", worst));
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const afm_test::Dataset data = afm_test::treering();
    const std::vector<Criterion> criteria = {
        {1, "Fisher constant", 1.0, fisher_constant},
        {2, "exact SE reproduction", 1.0, exact_se},
        {3, "TreeRing Whittle fit", 10.0, [&] { return treering_fit(data); }},
        {4, "AIC ranking", 120.0, [&] { return aic_ranking(data); }},
        {5, "Sowell vs quadrature", 60.0, sowell_quadrature},
        {6, "closed-form reductions", 60.0, closed_forms},
        {7, "asymptotic consistency", 60.0, asymptotic_consistency},
        {8, "estimator calibration", 300.0, calibration},
        {9, "GW size", 120.0, gw_size},
        {10, "rolling forecast significance", 600.0, [&] { return rolling_significance(data); }},
        {11, "simulation fidelity", 600.0, simulation_fidelity},
        {12, "gradient checks", 60.0, gradient_checks},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.status == Status::pass && seconds > c.budget_seconds) {
            o.status = Status::fail;
            o.detail += fmt(" [over the %.0f s budget]", c.budget_seconds);
        }
        const char* label = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
        if (o.status == Status::fail) ++failures;
        std::printf("%s %2d %s (%.2f s): %s\n", label, c.id, c.name, seconds, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}

// fimstar_acceptance: one PASS/FAIL line per acceptance criterion.
//
//   fimstar_acceptance [--suite fast|learning|slow|all] [--jobs N]
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fimstar/experiments.hpp"
#include "oracles.hpp"

using namespace fimstar;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    std::string suite;
    std::function<Outcome(int jobs)> run;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double rel_err(double got, double ref) {
    return std::abs(got - ref) / std::max({std::abs(got), std::abs(ref), 1e-12});
}

Batch random_batch(PrngStream& rng, int rows, int cols) {
    Batch b(rows, cols);
    for (double& v : b.data) {
        v = rng.uniform(-1.0, 1.0);
    }
    return b;
}

Batch concat(const Batch& a, const Batch& b) {
    Batch out(a.rows, a.cols + b.cols);
    for (int r = 0; r < a.rows; ++r) {
        std::copy(a.row(r).begin(), a.row(r).end(), out.row(r).begin());
        std::copy(b.row(r).begin(), b.row(r).end(), out.row(r).begin() + a.cols);
    }
    return out;
}

double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) {
        s += v;
    }
    return s / static_cast<double>(x.size());
}

double sample_var(const std::vector<double>& x) {
    if (x.size() < 2) {
        return 0.0;
    }
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) {
        s += (v - m) * (v - m);
    }
    return s / static_cast<double>(x.size() - 1);
}

// ---------------------------------------------------------------------------

Outcome fbl_rate_correctness(int) {
    PrngStream rng(101, 1);
    double identity = 0.0, near_shannon = 0.0;
    bool below = true;
    for (int i = 0; i < 100; ++i) {
        const double g = std::pow(10.0, rng.uniform(-3.0, 4.0));
        const double shannon = std::log2(1.0 + g);
        identity = std::max(identity, std::abs(fbl_rate(g, 0.5, 128) - shannon));
        below = below && fbl_rate(g, 1e-5, 128) <= shannon;
        near_shannon = std::max(near_shannon, std::abs(fbl_rate(g, 1e-5, 1000000000) - shannon));
    }
    return {identity <= 1e-12 && below && near_shannon <= 1e-3,
            "eps=0.5 err " + fmt(identity) + ", below Shannon " + (below ? "yes" : "no") + ", m_d=1e9 gap " +
                fmt(near_shannon)};
}

Outcome q_inverse_accuracy(int) {
    std::vector<double> grid;
    for (int i = 0; i < 500; ++i) {
        const double e = std::pow(10.0, -9.0 + (9.0 + std::log10(0.5)) * i / 499.0);
        grid.push_back(e);
        if (i < 499) {
            grid.push_back(1.0 - e);
        }
    }
    grid.push_back(1.0 - 1e-9 * 1.5);
    double worst = 0.0;
    for (double e : grid) {
        worst = std::max(worst, std::abs(gaussian_q(gaussian_q_inv(e)) - e) / e);
    }
    return {worst < 1e-8 && grid.size() == 1000, std::to_string(grid.size()) + " points, max rel err " + fmt(worst)};
}

Outcome channel_power_calibration(int) {
    const FimGeometry g = FimGeometry::planar(4, 4, 0.05, 0.1);
    const PrngStream root(102, 1);
    const int draws = 10000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) {
        PrngStream s = root.substream(static_cast<std::uint64_t>(i));
        sum += direct_channel(g, draw_paths(s, 16, 1.0)).squaredNorm() / 16.0;
    }
    const double m = sum / draws;
    return {m >= 0.95 && m <= 1.05, "mean |t|^2/P = " + fmt(m)};
}

Outcome star_constraint(int) {
    PrngStream rng(103, 1);
    const std::size_t f = 1000;
    std::vector<double> t(f), r(f), a(f), b(f);
    for (std::size_t i = 0; i < f; ++i) {
        t[i] = std::pow(10.0, rng.uniform(-200.0, 200.0)) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        r[i] = std::pow(10.0, rng.uniform(-200.0, 200.0)) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        a[i] = rng.uniform(-1e4, 1e4);
        b[i] = rng.uniform(-1e4, 1e4);
    }
    const double err = energy_split_error(build_matrices(project_feasible(t, r, a, b)));
    return {err < 1e-12, "max energy split error " + fmt(err)};
}

Outcome sinr_oracle(int) {
    PrngStream rng(104, 1);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        ChannelSet ch;
        Beamformer beam;
        auto fill = [&](Eigen::MatrixXcd& m, int rows, int cols) {
            m.resize(rows, cols);
            for (int i = 0; i < rows; ++i) {
                for (int j = 0; j < cols; ++j) {
                    m(i, j) = sample_cgauss(rng, 1.0);
                }
            }
        };
        fill(ch.t, 3, 3);
        fill(ch.H, 3, 2);
        fill(ch.k, 2, 3);
        fill(beam.w, 3, 3);
        ch.sector = {Sector::transmit, Sector::reflect, Sector::transmit};
        StarConfig star;
        for (int f = 0; f < 2; ++f) {
            star.theta_t.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
            star.theta_r.push_back(rng.uniform(0.0, 2.0 * std::numbers::pi));
            star.beta.push_back(rng.uniform());
        }
        LinkBudget budget;
        budget.sigma2.assign(3, rng.uniform(0.05, 2.0));
        budget.eps.assign(3, 1e-5);
        budget.gamma_min.assign(3, 0.0);
        budget.p_max = 1e9;
        const auto got = sinr(ch, build_matrices(star), beam, budget);
        const auto ref = oracle::sinr(ch, star, beam.w, budget.sigma2);
        for (int n = 0; n < 3; ++n) {
            worst = std::max(worst, rel_err(got[n], ref[n]));
        }
    }
    return {worst <= 1e-10, "100 instances, max rel err " + fmt(worst)};
}

Outcome gradient_checks(int) {
    PrngStream rng(105, 1);
    const int s_dim = 6, a_dim = 4, rows = 16, probes = 6;
    const Mlp actor({s_dim, 32, 24, a_dim}, Activation::tanh, rng);
    const Mlp critic({s_dim + a_dim, 32, 24, 1}, Activation::identity, rng);
    const Mlp meta({s_dim + a_dim, 16, 8, 1}, Activation::identity, rng);
    const Batch s = random_batch(rng, rows, s_dim), a = random_batch(rng, rows, a_dim);
    const Batch val = random_batch(rng, rows, s_dim);
    std::vector<double> y(rows);
    for (double& v : y) {
        v = rng.uniform(-2.0, 2.0);
    }

    auto probe = [&](const std::vector<double>& grad, const std::vector<double>& p0,
                     const std::function<double(const std::vector<double>&)>& f, double h) {
        double worst = 0.0;
        for (int i = 0; i < probes; ++i) {
            const auto d = oracle::random_direction(rng, p0.size());
            worst = std::max(worst, rel_err(oracle::dot(grad, d), oracle::directional_fd(f, p0, d, h)));
        }
        return worst;
    };

    std::vector<double> gc(critic.param_count(), 0.0);
    critic_loss(critic, critic.params(), s, a, y, gc);
    const double e_critic = probe(gc, {critic.params().begin(), critic.params().end()},
                                  [&](const std::vector<double>& p) { return critic_loss(critic, p, s, a, y, {}); },
                                  1e-6);

    std::vector<double> ga(actor.param_count(), 0.0);
    actor_loss(actor, actor.params(), critic, s, ga);
    const double e_actor = probe(ga, {actor.params().begin(), actor.params().end()},
                                 [&](const std::vector<double>& p) { return actor_loss(actor, p, critic, s, {}); },
                                 1e-6);

    const double lr = 0.05;
    const MetaGradient mg = meta_gradient(actor, critic, meta, meta_actor_step(actor, critic, meta, s, lr), s, val, lr);
    const double e_meta = probe(mg.grad, {meta.params().begin(), meta.params().end()},
                                [&](const std::vector<double>& kappa) {
                                    Mlp m = meta;
                                    m.param_vector() = kappa;
                                    return meta_gradient(actor, critic, m, meta_actor_step(actor, critic, m, s, lr), s,
                                                         val, lr)
                                        .value;
                                },
                                1e-5);
    return {e_critic <= 1e-4 && e_actor <= 1e-4 && e_meta <= 1e-3,
            std::to_string(probes) + " probes each; critic " + fmt(e_critic) + ", actor " + fmt(e_actor) +
                ", meta second-order " + fmt(e_meta)};
}

Outcome td3_mechanics(int) {
    PrngStream rng(106, 1);
    const int s_dim = 5, a_dim = 3, n = 1000;
    const Mlp q1({s_dim + a_dim, 16, 1}, Activation::identity, rng);
    const Mlp q2({s_dim + a_dim, 16, 1}, Activation::identity, rng);
    TransitionBatch tb;
    tb.states = random_batch(rng, n, s_dim);
    tb.actions = random_batch(rng, n, a_dim);
    tb.next_states = random_batch(rng, n, s_dim);
    const Batch next_a = random_batch(rng, n, a_dim);
    for (int i = 0; i < n; ++i) {
        tb.rewards.push_back(rng.uniform(-5.0, 5.0));
        tb.dones.push_back(i % 10 == 0 ? 1.0 : 0.0);
    }
    const double gamma = 0.9;
    const std::vector<double> y = critic_targets(tb, next_a, q1, q2, gamma);
    const Batch sa = concat(tb.next_states, next_a);
    const Batch v1 = mlp_forward(q1, sa), v2 = mlp_forward(q2, sa);
    int min_ok = 0;
    for (int i = 0; i < n; ++i) {
        const double expect = tb.dones[i] != 0.0 ? tb.rewards[i]
                                                 : tb.rewards[i] + gamma * std::min(v1.data[i], v2.data[i]);
        min_ok += std::abs(y[i] - expect) <= 1e-12 * std::max(1.0, std::abs(expect)) ? 1 : 0;
    }

    std::string counts;
    bool counts_ok = true;
    for (int delay : {2, 3}) {
        TrainerSetup setup;
        setup.env.p_y = 2;
        setup.env.p_z = 1;
        setup.env.elements = 4;
        setup.env.users = 2;
        setup.env.paths = 2;
        setup.env.episode_len = 10;
        setup.kind = AgentKind::td3;
        setup.td3.hidden = {16, 12};
        setup.td3.batch = 8;
        setup.td3.warmup = 11;
        setup.td3.capacity = 2000;
        setup.td3.policy_delay = delay;
        Trainer t(setup);
        t.train(101);
        const TrainingLog& log = t.log();
        counts_ok = counts_ok && log.update_steps == 1000 && log.actor_updates == 1000 / delay;
        counts += " d=" + std::to_string(delay) + ":" + std::to_string(log.update_steps) + "/" +
                  std::to_string(log.actor_updates);
    }

    const Mlp online({4, 8, 2}, Activation::tanh, rng);
    const Mlp start({4, 8, 2}, Activation::tanh, rng);
    bool soft_ok = true;
    for (double tau : {0.0, 0.5, 1.0}) {
        Mlp target = start;
        soft_update(target, online, tau);
        for (std::size_t i = 0; i < online.param_count(); ++i) {
            soft_ok = soft_ok && target.params()[i] == tau * online.params()[i] + (1.0 - tau) * start.params()[i];
        }
    }
    return {min_ok == n && counts_ok && soft_ok,
            "min target " + std::to_string(min_ok) + "/" + std::to_string(n) + ", updates/actor updates" + counts +
                ", soft update " + (soft_ok ? "exact" : "inexact")};
}

Outcome action_feasibility(int) {
    EnvConfig cfg = profile_defaults("desk").scenario;
    cfg.gamma_min_db = {0.0};
    const LinkBudget budget = cfg.budget();
    const ChannelRealization real =
        draw_realization(PrngStream(107, 1), cfg.elements, cfg.paths, cfg.link_powers(), cfg.sectors());
    PrngStream rng(107, 2);
    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        ActionVec a(static_cast<std::size_t>(cfg.action_dim()));
        for (double& v : a) {
            v = rng.uniform(-1.0, 1.0);
        }
        const SolutionPoint sol = decode_action(a, cfg);
        FimGeometry fim = cfg.fim_geometry();
        fim.x = sol.x;
        const RateReport rep = evaluate(sol, real.evaluate(fim, cfg.ris_grid()), budget, cfg.x_max);
        for (const Violation& v : rep.violations) {
            violations += v.constraint == Constraint::sinr_floor ? 0 : 1;
        }
    }
    return {violations == 0, "1000 actions, " + std::to_string(violations) + " power/morphing/energy violations"};
}

ExperimentConfig desk(int jobs) {
    ExperimentConfig cfg = profile_defaults("desk");
    cfg.jobs = jobs;
    return cfg;
}

Outcome learning_signal(int jobs) {
    const ExperimentConfig cfg = desk(jobs);
    const auto rows = run_convergence(cfg);
    std::map<AgentKind, std::vector<double>> per_seed;
    for (AgentKind kind : cfg.agents) {
        for (std::uint64_t seed : cfg.seeds) {
            std::vector<double> tail;
            for (const ConvergenceRow& r : rows) {
                if (r.agent == kind && r.seed == seed && r.episode >= cfg.episodes - 100) {
                    tail.push_back(r.episode_reward);
                }
            }
            per_seed[kind].push_back(mean(tail));
        }
    }
    const double n = static_cast<double>(cfg.seeds.size());
    const double meta = mean(per_seed[AgentKind::meta_td3]);
    const double td3 = mean(per_seed[AgentKind::td3]);
    const double rnd = mean(per_seed[AgentKind::random]);
    const double pooled_se =
        std::sqrt((sample_var(per_seed[AgentKind::meta_td3]) + sample_var(per_seed[AgentKind::td3])) / n);
    const bool beats_random = rnd > 0.0 ? meta >= 1.25 * rnd : meta >= rnd + 0.25 * std::abs(rnd);
    const bool matches_td3 = meta >= td3 - pooled_se;
    return {beats_random && matches_td3, "last-100 mean reward meta_td3 " + fmt(meta) + ", td3 " + fmt(td3) +
                                             ", random " + fmt(rnd) + ", pooled SE " + fmt(pooled_se)};
}

// Mean over seeds at each grid point, with a standard error that combines
// seed-to-seed spread and the evaluation-draw error of each seed.
Outcome trend(const ExperimentConfig& cfg, const std::string& label) {
    const auto rows = run_sweep(cfg);
    const std::size_t points = cfg.sweep.grid.size();
    const double n = static_cast<double>(cfg.seeds.size());
    std::vector<double> m(points), se(points);
    for (std::size_t i = 0; i < points; ++i) {
        std::vector<double> vals;
        double eval_var = 0.0;
        for (const SweepRow& r : rows) {
            if (r.sweep_value == cfg.sweep.grid[i]) {
                vals.push_back(r.mean_sum_rate);
                eval_var += r.std_err * r.std_err;
            }
        }
        m[i] = mean(vals);
        se[i] = std::sqrt(sample_var(vals) / n + eval_var / (n * n));
    }
    bool ok = true;
    std::string detail = label + ":";
    for (std::size_t i = 0; i < points; ++i) {
        detail += " " + format_number(cfg.sweep.grid[i]) + "->" + fmt(m[i]) + "(" + fmt(se[i]) + ")";
        if (i > 0) {
            ok = ok && m[i] >= m[i - 1] - std::sqrt(se[i] * se[i] + se[i - 1] * se[i - 1]);
        }
    }
    return {ok, detail};
}

Outcome trend_checks(int jobs) {
    ExperimentConfig cfg = desk(jobs);
    cfg.agents = {AgentKind::meta_td3};
    cfg.seeds = {1, 2};
    cfg.sweep.kind = SweepKind::power;
    cfg.sweep.grid = default_grid(SweepKind::power);
    const Outcome power = trend(cfg, "p_max dBm");
    cfg.sweep.kind = SweepKind::ris_elements;
    cfg.sweep.grid = default_grid(SweepKind::ris_elements);
    const Outcome elements = trend(cfg, "elements");
    return {power.pass && elements.pass, power.detail + "; " + elements.detail};
}

Outcome determinism(int jobs) {
    ExperimentConfig cfg = desk(jobs);
    cfg.episodes = 60;
    cfg.seeds = {7};
    const std::string a = convergence_csv(cfg, run_convergence(cfg));
    const std::string b = convergence_csv(cfg, run_convergence(cfg));
    cfg.agents = {AgentKind::td3};
    cfg.sweep.kind = SweepKind::power;
    cfg.sweep.grid = {25.0, 30.0};
    cfg.eval_draws = 20;
    const std::string c = sweep_csv(cfg, run_sweep(cfg));
    const std::string d = sweep_csv(cfg, run_sweep(cfg));
    return {a == b && c == d && !a.empty() && !c.empty(), "convergence CSV " + std::to_string(a.size()) + " bytes " +
                                                              (a == b ? "identical" : "differs") + ", sweep CSV " +
                                                              (c == d ? "identical" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fimstar acceptance checks"};
    std::string suite = "all";
    int jobs = 1;
    app.add_option("--suite", suite, "fast, learning, slow or all")
        ->check(CLI::IsMember({"fast", "learning", "slow", "all"}));
    app.add_option("--jobs", jobs, "Parallel training jobs")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {"fbl_rate_correctness", "fast", fbl_rate_correctness},
        {"q_inverse_accuracy", "fast", q_inverse_accuracy},
        {"channel_power_calibration", "fast", channel_power_calibration},
        {"star_constraint", "fast", star_constraint},
        {"sinr_oracle_equivalence", "fast", sinr_oracle},
        {"gradient_checks", "fast", gradient_checks},
        {"td3_mechanics", "fast", td3_mechanics},
        {"action_feasibility", "fast", action_feasibility},
        {"determinism", "fast", determinism},
        {"learning_signal", "learning", learning_signal},
        {"trend_checks", "slow", trend_checks},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        if (suite != "all" && suite != c.suite) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run(jobs);
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += out.pass ? 0 : 1;
        std::cout << (out.pass ? "PASS " : "FAIL ") << c.name << ": " << out.detail << " [" << fmt(secs) << " s]"
                  << std::endl;
    }
    return failures == 0 ? 0 : 1;
}

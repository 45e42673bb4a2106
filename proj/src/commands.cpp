#include "lambda_decouple/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "lambda_decouple/errors.hpp"
#include "lambda_decouple/format.hpp"
#include "lambda_decouple/schedule.hpp"
#include "parallel.hpp"

namespace lambda_decouple {

namespace {

constexpr double kGroupTolerance = 1e-10;

std::string num(double v) {
    return format_significant(v, 12);
}

void write_output(const CommandContext& ctx, const std::string& content,
                  const std::optional<std::string>& path) {
    if (!path) {
        ctx.out << content;
        return;
    }
    std::ofstream os(*path, std::ios::binary | std::ios::trunc);
    if (!os) {
        throw ConfigError("cannot open output file '" + *path + "'");
    }
    os << content;
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
    std::filesystem::path p(path);
    const std::string stem = p.stem().string();
    return (p.parent_path() / (stem + suffix + p.extension().string())).string();
}

} // namespace

unsigned resolve_threads(std::optional<int> flag) {
    int requested = 0;
    if (flag) {
        requested = *flag;
    } else if (const char* env = std::getenv("LAMBDA_DECOUPLE_THREADS")) {
        requested = std::atoi(env);
    }
    if (requested < 0) {
        throw ConfigError("thread count must be >= 0");
    }
    if (requested == 0) {
        return std::max(1u, std::thread::hardware_concurrency());
    }
    return static_cast<unsigned>(requested);
}

GroupReport verify_group_report(double perturb_h1) {
    GroupReport r;
    Operator3 h1 = build_bb_element(BangBang::h1);
    const Operator3 h2 = build_bb_element(BangBang::h2);
    if (perturb_h1 != 0.0) {
        const Operator3 tilt = std::cos(perturb_h1) * (sigma_op(Axis::plus, kPair10) * sigma_op(Axis::minus, kPair10) +
                                                        sigma_op(Axis::minus, kPair10) * sigma_op(Axis::plus, kPair10)) +
                               Complex(0.0, std::sin(perturb_h1)) * sigma_op(Axis::x, kPair10) +
                               sigma_op(Axis::plus, kPair21) * sigma_op(Axis::minus, kPair21);
        h1 = h1 * tilt;
    }
    const auto group = DecouplingGroup::make({Operator3::Identity(), h1, h2});
    r.sym_sz20 = max_abs(symmetrize(sigma_op(Axis::z, kPair20), group));
    r.sym_sz21 = max_abs(symmetrize(sigma_op(Axis::z, kPair21), group));
    r.unitarity_h1 = max_abs(h1.adjoint() * h1 - Operator3::Identity());
    r.unitarity_h2 = max_abs(h2.adjoint() * h2 - Operator3::Identity());
    r.product_h1 = max_abs(h1 - bb_pulse_product(BangBang::h1));
    r.product_h2 = max_abs(h2 - bb_pulse_product(BangBang::h2));
    const auto levels = SystemLevels::make(0.0, 0.5, 2.0);
    r.h0_decomposition = max_abs(build_h0(levels) - h0_from_transition_sum(levels));
    r.closure = verify_group_closure(group);
    for (double v : {r.sym_sz20, r.sym_sz21, r.unitarity_h1, r.unitarity_h2, r.product_h1,
                     r.product_h2, r.h0_decomposition}) {
        r.pass = r.pass && v < kGroupTolerance;
    }
    return r;
}

int cmd_verify_group(const RunConfig& config, CommandContext& ctx) {
    const GroupReport r = verify_group_report(config.perturb_h1);
    std::ostringstream os;
    os << config.echo();
    os << "residual symmetrize_sz20 " << format_significant(r.sym_sz20, 6) << '\n'
       << "residual symmetrize_sz21 " << format_significant(r.sym_sz21, 6) << '\n'
       << "residual pulse_product_h1 " << format_significant(r.product_h1, 6) << '\n'
       << "residual pulse_product_h2 " << format_significant(r.product_h2, 6) << '\n'
       << "residual unitarity_h1 " << format_significant(r.unitarity_h1, 6) << '\n'
       << "residual unitarity_h2 " << format_significant(r.unitarity_h2, 6) << '\n'
       << "residual h0_transition_sum " << format_significant(r.h0_decomposition, 6) << '\n';
    static const char* names[] = {"I", "h1", "h2"};
    os << "closure left right product phase_re phase_im\n";
    for (const auto& e : r.closure.table) {
        os << "closure " << names[e.left] << ' ' << names[e.right] << ' '
           << (e.product ? names[*e.product] : "none") << ' ' << num(e.phase.real()) << ' '
           << num(e.phase.imag()) << '\n';
    }
    os << "group_closed " << (r.closure.closed ? "yes" : "no") << '\n';
    os << "status " << (r.pass ? "PASS" : "FAIL") << '\n';
    write_output(ctx, os.str(), ctx.out_path);
    return r.pass ? exit_status::ok : exit_status::failure;
}

std::string render_figure3_csv(const RunConfig& config, const Figure3Grid& grid) {
    std::ostringstream os;
    os << config.echo();
    os << "omega_c_t,n_cycles,gamma2,decoherence_factor\n";
    for (const auto& c : grid.cells) {
        os << num(c.omega_c_t) << ',' << c.n_cycles << ',';
        if (c.ok) {
            os << num(c.gamma2) << ',' << num(c.decoherence_factor) << '\n';
        } else {
            os << "nan,nan\n";
        }
    }
    return os.str();
}

int cmd_dephasing_curve(const RunConfig& config, CommandContext& ctx) {
    const BathSpectrum spectrum = config.spectrum();
    std::vector<std::pair<std::string, Figure3Grid>> grids;
    if (config.slicing == "both" && !ctx.out_path) {
        throw ConfigError("slicing=both needs --out");
    }
    if (config.slicing != "fixed_dt") {
        grids.emplace_back("fixed_t", figure3_grid(spectrum, config.t_max, config.n_list,
                                                   config.t_points, ctx.threads));
    }
    if (config.slicing != "fixed_t") {
        grids.emplace_back("fixed_dt", figure3_fixed_dt(spectrum, config.t_max, config.n_max, ctx.threads));
    }

    std::size_t total = 0;
    std::size_t failed = 0;
    for (const auto& [name, grid] : grids) {
        total += grid.cells.size();
        failed += grid.failed_cells;
        const auto path = (name == "fixed_dt" && grids.size() == 2)
                              ? std::optional<std::string>(sibling_path(*ctx.out_path, "_fixed_dt"))
                              : ctx.out_path;
        write_output(ctx, render_figure3_csv(config, grid), path);

        // Summary per N.
        std::map<int, std::pair<double, double>> range;
        for (const auto& c : grid.cells) {
            if (!c.ok) {
                ctx.err << "warning: cell omega_c_t=" << num(c.omega_c_t) << " N=" << c.n_cycles
                        << " failed: " << c.error << '\n';
                continue;
            }
            auto [it, fresh] = range.try_emplace(c.n_cycles, c.decoherence_factor, c.decoherence_factor);
            if (!fresh) {
                it->second.first = std::min(it->second.first, c.decoherence_factor);
                it->second.second = std::max(it->second.second, c.decoherence_factor);
            }
        }
        if (name == "fixed_t") {
            for (const auto& [n, mm] : range) {
                ctx.err << "summary " << name << " N=" << n << " min_factor=" << num(mm.first)
                        << " max_factor=" << num(mm.second) << '\n';
            }
            for (const auto& v : grid.monotonicity_violations) {
                ctx.err << "note: non-monotone in N at " << v << '\n';
            }
        } else {
            const auto& last = grid.cells.back();
            ctx.err << "summary " << name << " N=1.." << last.n_cycles
                    << " factor_at_t_max=" << num(last.decoherence_factor) << '\n';
        }
    }
    if (failed == total && total > 0) {
        ctx.err << "error: every grid cell failed\n";
        return exit_status::numerical;
    }
    return exit_status::ok;
}

int cmd_quiet_regime(const RunConfig& config, CommandContext& ctx) {
    const QuietSweep k1 = quiet_regime_sweep(Channel::k1, config.quiet_points);
    const QuietSweep k2 = quiet_regime_sweep(Channel::k2, config.quiet_points);
    const double expected = quiet_threshold();
    std::ostringstream os;
    os << config.echo();
    os << "# arccos(3/4)=" << num(expected) << '\n';
    os << "# crossover_k1=" << num(k1.crossover)
       << " deviation=" << format_significant(std::abs(k1.crossover - expected), 3) << '\n';
    os << "# crossover_k2=" << num(k2.crossover)
       << " deviation=" << format_significant(std::abs(k2.crossover - expected), 3) << '\n';
    os << "omega_dt,ratio_k1,ratio_k2\n";
    for (std::size_t i = 0; i < k1.theta.size(); ++i) {
        os << num(k1.theta[i]) << ',' << num(k1.ratio[i]) << ',' << num(k2.ratio[i]) << '\n';
    }
    write_output(ctx, os.str(), ctx.out_path);
    const bool ok = std::abs(k1.crossover - expected) < 1e-6 && std::abs(k2.crossover - expected) < 1e-6;
    ctx.err << "quiet-regime threshold k1=" << num(k1.crossover) << " k2=" << num(k2.crossover)
            << " expected=" << num(expected) << (ok ? " PASS" : " FAIL") << '\n';
    return ok ? exit_status::ok : exit_status::failure;
}

std::vector<OracleCase> oracle_suite(const RunConfig& config) {
    std::vector<OracleCase> cases;
    auto temp_tag = [](double ratio) { return "T" + num(ratio); };
    for (Channel ch : config.oracle_channels) {
        cases.push_back({std::string(to_string(ch)) + "_zero_coupling", ch, 0.0, 3, 0.0, true});
        for (double ratio : config.oracle_temperatures) {
            const double temp = ratio * config.oracle_omega;
            for (int n : config.oracle_n_list) {
                cases.push_back({std::string(to_string(ch)) + "_" + temp_tag(ratio) + "_N" + std::to_string(n) + "_pulsed",
                                 ch, temp, n, config.oracle_g, true});
            }
            cases.push_back({std::string(to_string(ch)) + "_" + temp_tag(ratio) + "_N3_free", ch, temp, 3,
                             config.oracle_g, false});
        }
    }
    return cases;
}

OracleCaseOutcome run_oracle_case(const RunConfig& config, const OracleCase& c) {
    const auto levels = SystemLevels::make(config.e0, config.e1, config.e2);
    const double dt = config.oracle_theta / config.oracle_omega;
    const std::vector<TruncatedMode> modes{{config.oracle_omega, c.g, c.channel, config.oracle_cutoff}};
    const auto schedule = build_schedule(dt, c.n_cycles, config.tau_p);
    // Equal superposition of the three levels.
    const Operator3 rho0 = Operator3::Constant(Complex(1.0 / 3.0, 0.0));
    OracleOptions opts;
    opts.pulses = c.pulsed ? PulseHandling::apply : PulseHandling::suppress;
    opts.truncation = TruncationPolicy::warn;

    OracleCaseOutcome out{c, run_oracle(levels, modes, c.temperature, schedule, rho0, opts), {}, {}};
    out.analytic = analytic_coherence_magnitudes(modes, c.temperature, dt, c.n_cycles, c.pulsed,
                                                 std::abs(rho0(0, 2)));
    out.report = compare_analytic(out.oracle, out.analytic);
    return out;
}

std::string render_oracle_trace_csv(const RunConfig& config, const OracleCaseOutcome& o) {
    std::ostringstream os;
    os << config.echo();
    os << "# case=" << o.oracle_case.name << '\n';
    os << "# convention: " << o.report.convention << '\n';
    os << "# max_deviation=" << format_significant(o.report.max_deviation, 6)
       << " status=" << (o.report.pass ? "PASS" : "FAIL") << '\n';
    os << "time,rho02_re,rho02_im,pop0,pop1,pop2\n";
    for (std::size_t i = 0; i < o.oracle.times.size(); ++i) {
        const Operator3& r = o.oracle.reduced[i];
        os << num(o.oracle.times[i]) << ',' << num(r(0, 2).real()) << ',' << num(r(0, 2).imag()) << ','
           << num(o.oracle.populations[i](0)) << ',' << num(o.oracle.populations[i](1)) << ','
           << num(o.oracle.populations[i](2)) << '\n';
    }
    return os.str();
}

int cmd_oracle_check(const RunConfig& config, CommandContext& ctx) {
    const auto cases = oracle_suite(config);
    std::vector<std::optional<OracleCaseOutcome>> outcomes(cases.size());
    std::vector<std::string> errors(cases.size());
    detail::parallel_for(cases.size(), ctx.threads, [&](std::size_t i) {
        try {
            outcomes[i] = run_oracle_case(config, cases[i]);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    if (ctx.out_path) {
        std::filesystem::create_directories(*ctx.out_path);
    }
    ctx.out << "# convention: " << kComparatorConvention << '\n';
    ctx.out << "case max_deviation pop_drift trace_drift status\n";
    bool all_pass = true;
    double worst = 0.0;
    std::string worst_case;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        if (!outcomes[i]) {
            all_pass = false;
            ctx.out << cases[i].name << " error - - FAIL\n";
            ctx.err << "error: " << cases[i].name << ": " << errors[i] << '\n';
            continue;
        }
        const auto& o = *outcomes[i];
        all_pass = all_pass && o.report.pass;
        if (o.report.max_deviation >= worst) {
            worst = o.report.max_deviation;
            worst_case = cases[i].name;
        }
        ctx.out << cases[i].name << ' ' << format_significant(o.report.max_deviation, 3) << ' '
                << format_significant(o.oracle.max_population_drift, 3) << ' '
                << format_significant(o.oracle.max_trace_drift, 3) << ' '
                << (o.report.pass ? "PASS" : "FAIL") << '\n';
        for (const auto& w : o.report.warnings) {
            ctx.err << "warning: " << cases[i].name << ": " << w << '\n';
        }
        if (ctx.out_path) {
            write_output(ctx, render_oracle_trace_csv(config, o),
                         (std::filesystem::path(*ctx.out_path) / (cases[i].name + ".csv")).string());
        }
    }
    if (!all_pass) {
        ctx.err << "oracle-check FAILED; worst deviation " << format_significant(worst, 6) << " in "
                << worst_case << '\n';
        return exit_status::failure;
    }
    return exit_status::ok;
}

int cmd_schedule(const RunConfig& config, CommandContext& ctx) {
    const auto s = build_schedule(config.delta_t, config.n_cycles, config.tau_p);
    write_output(ctx, dump_schedule(s), ctx.out_path);
    return exit_status::ok;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bang-bang dephasing suppression for a Lambda-configuration atom"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::optional<std::string> config_path;
    std::optional<std::string> out_path;
    std::vector<std::string> sets;
    std::optional<int> threads;
    double perturb = 0.0;

    app.add_option("--config", config_path, "key=value configuration file");
    app.add_option("--out", out_path, "output file (directory for oracle-check)");
    app.add_option("--set", sets, "override key=value (repeatable)");
    app.add_option("--threads", threads, "worker threads (0 = auto)");

    auto* verify = app.add_subcommand("verify-group", "check the decoupling-group identities");
    verify->add_option("--perturb-h1", perturb, "tilt h1 by this angle (fault injection)");
    app.add_subcommand("dephasing-curve", "exp(-Gamma_2) grid as CSV");
    app.add_subcommand("quiet-regime", "locate the per-mode quiet-regime crossover");
    app.add_subcommand("oracle-check", "compare exact truncated-Fock evolution with the analytic exponents");
    app.add_subcommand("schedule", "dump the twinborn-pulse schedule");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_status::ok;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return exit_status::usage;
    }

    try {
        ConfigMap map;
        if (config_path) {
            std::ifstream is(*config_path, std::ios::binary);
            if (!is) {
                throw ConfigError("cannot read config file '" + *config_path + "'");
            }
            std::stringstream ss;
            ss << is.rdbuf();
            map = parse_config_text(ss.str());
        }
        for (const auto& s : sets) {
            apply_override(map, s);
        }
        if (perturb != 0.0) {
            map["perturb_h1"] = format_significant(perturb, 17);
        }
        const RunConfig config = resolve_config(map);
        CommandContext ctx{out_path, resolve_threads(threads), out, err};

        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "verify-group") {
            return cmd_verify_group(config, ctx);
        }
        if (name == "dephasing-curve") {
            return cmd_dephasing_curve(config, ctx);
        }
        if (name == "quiet-regime") {
            return cmd_quiet_regime(config, ctx);
        }
        if (name == "oracle-check") {
            return cmd_oracle_check(config, ctx);
        }
        return cmd_schedule(config, ctx);
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_status::usage;
    } catch (const InvalidInput& e) {
        err << "usage error: " << e.what() << '\n';
        return exit_status::usage;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_status::numerical;
    } catch (const TruncationError& e) {
        err << "validation failure: " << e.what() << '\n';
        return exit_status::failure;
    }
}

} // namespace lambda_decouple

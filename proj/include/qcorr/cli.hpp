#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qcorr/io.hpp"
#include "qcorr/qcorr.hpp"

namespace qcorr::cli {

using io::AngleUnit;

/// Bad user input (argument or value range). Maps to exit code 2.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything a run needs, in one flat bag. Round-trips through JSON.
struct RunConfig {
    std::string command;
    AngleUnit unit = AngleUnit::deg;
    std::string format = "json";
    std::optional<std::string> output;
    std::uint64_t seed = 0;
    unsigned threads = 1;

    std::string scenario;
    std::vector<double> angles;  ///< in the input unit
    std::optional<std::uint64_t> samples;
    std::string state = "default";
    bool batch = false;

    std::string source = "singlet";
    std::string family = "chsh";
    double step = -1.0;  ///< input unit; negative means "unit default" (5 deg)
    int iters = 40;
    double from = 0.0;
    double to = -1.0;    ///< input unit; negative means a half turn

    std::vector<double> correlations;

    std::string kind;
    double i0 = 1.0;

    bool operator==(const RunConfig&) const = default;
};

inline std::string to_json_string(const RunConfig& c) {
    io::JsonWriter w;
    w.begin_object();
    w.key("command").value(c.command);
    w.key("unit").value(io::unit_name(c.unit));
    w.key("format").value(c.format);
    w.key("output").value(c.output);
    w.key("seed").value(c.seed);
    w.key("threads").value(static_cast<std::uint64_t>(c.threads));
    w.key("params").begin_object();
    w.key("scenario").value(c.scenario);
    w.key("angles").numbers(c.angles);
    w.key("samples").value(c.samples);
    w.key("state").value(c.state);
    w.key("batch").value(c.batch);
    w.key("source").value(c.source);
    w.key("family").value(c.family);
    w.key("step").value(c.step);
    w.key("iters").value(c.iters);
    w.key("from").value(c.from);
    w.key("to").value(c.to);
    w.key("correlations").numbers(c.correlations);
    w.key("kind").value(c.kind);
    w.key("i0").value(c.i0);
    w.end_object();
    w.end_object();
    return w.str();
}

inline RunConfig from_json_string(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    RunConfig c;
    c.command = j.at("command").get<std::string>();
    c.unit = j.at("unit").get<std::string>() == "rad" ? AngleUnit::rad : AngleUnit::deg;
    c.format = j.at("format").get<std::string>();
    if (!j.at("output").is_null()) c.output = j.at("output").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.threads = j.at("threads").get<unsigned>();
    const auto& p = j.at("params");
    c.scenario = p.at("scenario").get<std::string>();
    c.angles = p.at("angles").get<std::vector<double>>();
    if (!p.at("samples").is_null()) c.samples = p.at("samples").get<std::uint64_t>();
    c.state = p.at("state").get<std::string>();
    c.batch = p.at("batch").get<bool>();
    c.source = p.at("source").get<std::string>();
    c.family = p.at("family").get<std::string>();
    c.step = p.at("step").get<double>();
    c.iters = p.at("iters").get<int>();
    c.from = p.at("from").get<double>();
    c.to = p.at("to").get<double>();
    c.correlations = p.at("correlations").get<std::vector<double>>();
    c.kind = p.at("kind").get<std::string>();
    c.i0 = p.at("i0").get<double>();
    return c;
}

namespace detail {

inline Angle parse_angle(double v, AngleUnit unit) {
    if (!std::isfinite(v)) throw usage_error("malformed angle (not finite)");
    return unit == AngleUnit::deg ? from_degrees(v) : Angle{v};
}

inline double resolve_step(const RunConfig& cfg) {
    if (cfg.step < 0.0) return 5.0 * std::numbers::pi / 180.0;
    return parse_angle(cfg.step, cfg.unit).radians;
}

inline double resolve_to(const RunConfig& cfg) {
    if (cfg.to < 0.0) return std::numbers::pi;
    return parse_angle(cfg.to, cfg.unit).radians;
}

inline std::vector<Angle> parse_angles(const std::vector<double>& vs, AngleUnit unit) {
    std::vector<Angle> out;
    out.reserve(vs.size());
    for (double v : vs) out.push_back(parse_angle(v, unit));
    return out;
}

inline scenarios::Scenario parse_scenario(const std::string& name) {
    if (name == "bell") return scenarios::Scenario::bell_pair;
    if (name == "sequential") return scenarios::Scenario::sequential_chain;
    if (name == "product") return scenarios::Scenario::product_pair;
    if (name == "culled") return scenarios::Scenario::culled_pair;
    if (name == "triple-operator") return scenarios::Scenario::triple_operator;
    if (name == "triple-chain") return scenarios::Scenario::triple_chain;
    throw usage_error("unknown scenario '" + name +
                      "' (expected bell|sequential|product|culled|triple-operator|triple-chain)");
}

inline scenarios::InitialState parse_state(const std::string& name, scenarios::Scenario s) {
    if (name == "default") return scenarios::canonical_state(s);
    if (name == "mixed") return scenarios::InitialState::maximally_mixed;
    if (name == "up-z") return scenarios::InitialState::up_z;
    if (name == "up-x") return scenarios::InitialState::up_x;
    if (name == "up-y") return scenarios::InitialState::up_y;
    throw usage_error("unknown state '" + name + "' (expected mixed|up-z|up-x|up-y)");
}

/// Correlation functions selectable for scans and maximization.
inline std::function<double(Angle, Angle)> parse_source(const std::string& name) {
    if (name == "singlet")
        return [](Angle a, Angle b) { return scenarios::bell_correlation(a, b); };
    if (name == "product")
        return [](Angle a, Angle b) { return scenarios::product_correlation(a, b); };
    if (name == "lhv-anti")
        return [](Angle a, Angle b) {
            return lhv::lhv_correlation_exact({lhv::Geometry::planar, lhv::Pairing::anti_pair}, a,
                                              b);
        };
    if (name == "lhv-same")
        return [](Angle a, Angle b) {
            return lhv::lhv_correlation_exact({lhv::Geometry::planar, lhv::Pairing::same_spin}, a,
                                              b);
        };
    throw usage_error("unknown source '" + name +
                      "' (expected singlet|product|lhv-anti|lhv-same)");
}

inline ineq::Family parse_family(const std::string& name) {
    if (name == "bell-sum") return ineq::Family::bell_sum;
    if (name == "bell-canonical") return ineq::Family::bell_canonical;
    if (name == "chsh") return ineq::Family::chsh;
    throw usage_error("unknown family '" + name + "' (expected bell-sum|bell-canonical|chsh)");
}

inline std::string record_report(const scenarios::CorrelationRecord& rec,
                                 const RunConfig& cfg) {
    if (cfg.format != "csv") {
        io::JsonWriter w;
        io::to_json(w, rec, cfg.unit);
        return w.str();
    }
    io::CsvWriter csv;
    std::vector<std::string> cols = {"scenario", "a1",       "a2",     "a3",      "unit",
                                     "value_re", "value_im", "method", "samples", "seed"};
    csv.header(cols);
    std::vector<std::string> cells = {scenarios::scenario_name(rec.scenario)};
    for (std::size_t i = 0; i < 3; ++i)
        cells.push_back(i < rec.angles.size() ? csv.cell(io::in_unit(rec.angles[i], cfg.unit))
                                              : "");
    cells.push_back(io::unit_name(cfg.unit));
    cells.push_back(csv.cell(rec.value.real()));
    cells.push_back(csv.cell(rec.value.imag()));
    cells.push_back(rec.method == scenarios::Method::exact ? "exact" : "sampled");
    cells.push_back(rec.samples ? std::to_string(*rec.samples) : "");
    cells.push_back(rec.seed ? std::to_string(*rec.seed) : "");
    csv.row(cells);
    return csv.str();
}

inline std::string correlate_cmd(const RunConfig& cfg) {
    const auto scenario = parse_scenario(cfg.scenario);
    const auto angles = parse_angles(cfg.angles, cfg.unit);
    if (static_cast<int>(angles.size()) != scenarios::scenario_arity(scenario))
        throw usage_error("scenario '" + cfg.scenario + "' needs " +
                          std::to_string(scenarios::scenario_arity(scenario)) + " angles");
    const auto state = parse_state(cfg.state, scenario);

    if (cfg.batch || cfg.samples) {
        const std::uint64_t count = cfg.samples.value_or(10000);
        if (count < 1) throw usage_error("sample count must be at least 1");
        const auto batch = scenarios::sample(scenario, angles, count, cfg.seed, state, cfg.threads);
        if (cfg.batch) {
            if (cfg.format == "csv") return io::to_csv(batch);
            io::JsonWriter w;
            io::to_json(w, batch, cfg.unit);
            return w.str();
        }
        return record_report(scenarios::estimate(batch), cfg);
    }

    return record_report(scenarios::exact_record(scenario, angles, state), cfg);
}

inline std::string equivalence_cmd(const RunConfig& cfg) {
    const auto angles = parse_angles(cfg.angles, cfg.unit);
    const Angle theta = angles[0], phi = angles[1];
    const auto rep = scenarios::equivalence_report(theta, phi);

    io::JsonWriter w;
    w.begin_object();
    w.key("theta").value(io::in_unit(theta, cfg.unit));
    w.key("phi").value(io::in_unit(phi, cfg.unit));
    w.key("unit").value(io::unit_name(cfg.unit));
    w.key("c_ab").value(rep.c_ab);
    w.key("c_bb").value(rep.c_bb);
    w.key("max_conditional_diff").value(rep.max_conditional_diff);
    w.key("matches").value(rep.matches);
    w.key("conditionals").begin_array();
    const auto mixed = spinalg::DensityMatrix<2>::maximally_mixed();
    for (spinalg::Outcome s : spinalg::both_outcomes) {
        const auto opp =
            s == spinalg::Outcome::plus ? spinalg::Outcome::minus : spinalg::Outcome::plus;
        for (spinalg::Outcome s2 : spinalg::both_outcomes) {
            w.begin_object();
            w.key("given_first_outcome").value(spinalg::sign_of(s));
            w.key("second_outcome").value(spinalg::sign_of(s2));
            w.key("bell_conditional").value(scenarios::bell_conditional(theta, phi, opp, s2));
            w.key("sequential_conditional")
                .value(scenarios::sequential_conditional(mixed, theta, phi, s, s2));
            w.end_object();
        }
    }
    w.end_array();
    w.end_object();
    return w.str();
}

inline std::string scan_bell_cmd(const RunConfig& cfg) {
    const auto corr = parse_source(cfg.source);
    const double step = resolve_step(cfg);
    const double lo = parse_angle(cfg.from, cfg.unit).radians;
    const double hi = resolve_to(cfg);
    if (!(step > 0.0) || !(hi > lo)) throw usage_error("bad scan range or step");

    if (cfg.format == "csv") {
        io::CsvWriter csv;
        std::vector<std::string> cols = {"t1",
                                         "t2",
                                         "t3",
                                         "sum_expression",
                                         "canonical_lhs",
                                         "canonical_rhs",
                                         "violated_canonical",
                                         "within_sum_bounds"};
        csv.header(cols);
        ineq::scan_bell(corr, step, lo, hi, [&](const ineq::BellReport& r) {
            std::vector<std::string> cells;
            for (Angle a : r.angles) cells.push_back(csv.cell(io::in_unit(a, cfg.unit)));
            cells.push_back(csv.cell(r.sum_expression));
            cells.push_back(csv.cell(r.canonical_lhs));
            cells.push_back(csv.cell(r.canonical_rhs));
            cells.push_back(r.violated_canonical ? "1" : "0");
            cells.push_back(r.within_sum_bounds ? "1" : "0");
            csv.row(cells);
        });
        return csv.str();
    }

    std::uint64_t rows = 0, violated = 0, outside_sum = 0;
    double worst_margin = -1e300;
    std::array<Angle, 3> worst{};
    ineq::scan_bell(corr, step, lo, hi, [&](const ineq::BellReport& r) {
        ++rows;
        violated += r.violated_canonical;
        outside_sum += !r.within_sum_bounds;
        const double margin = r.canonical_lhs - r.canonical_rhs;
        if (margin > worst_margin) {
            worst_margin = margin;
            worst = r.angles;
        }
    });
    io::JsonWriter w;
    w.begin_object();
    w.key("source").value(cfg.source);
    w.key("rows").value(rows);
    w.key("violated_canonical").value(violated);
    w.key("outside_sum_bounds").value(outside_sum);
    w.key("max_canonical_margin").value(worst_margin);
    w.key("argmax").begin_array();
    for (Angle a : worst) w.value(io::in_unit(a, cfg.unit));
    w.end_array();
    w.key("unit").value(io::unit_name(cfg.unit));
    w.end_object();
    return w.str();
}

inline std::string scan_chsh_cmd(const RunConfig& cfg) {
    const auto corr = parse_source(cfg.source);
    const double step = resolve_step(cfg);
    const double lo = parse_angle(cfg.from, cfg.unit).radians;
    const double hi = resolve_to(cfg);
    if (!(step > 0.0) || !(hi > lo)) throw usage_error("bad scan range or step");

    if (cfg.format == "csv") {
        io::CsvWriter csv;
        std::vector<std::string> cols = {"a", "a_prime", "b", "b_prime", "s_value", "violated"};
        csv.header(cols);
        ineq::scan_chsh(corr, step, lo, hi, [&](const ineq::ChshReport& r) {
            std::vector<std::string> cells;
            for (Angle a : r.settings) cells.push_back(csv.cell(io::in_unit(a, cfg.unit)));
            cells.push_back(csv.cell(r.s_value));
            cells.push_back(r.violated ? "1" : "0");
            csv.row(cells);
        });
        return csv.str();
    }

    std::uint64_t rows = 0, violated = 0;
    double max_abs_s = 0.0;
    std::array<Angle, 4> worst{};
    ineq::scan_chsh(corr, step, lo, hi, [&](const ineq::ChshReport& r) {
        ++rows;
        violated += r.violated;
        if (std::abs(r.s_value) > max_abs_s) {
            max_abs_s = std::abs(r.s_value);
            worst = r.settings;
        }
    });
    io::JsonWriter w;
    w.begin_object();
    w.key("source").value(cfg.source);
    w.key("rows").value(rows);
    w.key("violated").value(violated);
    w.key("max_abs_s").value(max_abs_s);
    w.key("argmax").begin_array();
    for (Angle a : worst) w.value(io::in_unit(a, cfg.unit));
    w.end_array();
    w.key("unit").value(io::unit_name(cfg.unit));
    w.end_object();
    return w.str();
}

inline std::string maximize_cmd(const RunConfig& cfg) {
    const auto corr = parse_source(cfg.source);
    const auto family = parse_family(cfg.family);
    const Angle step{cfg.step < 0.0 ? std::numbers::pi / 16.0
                                    : parse_angle(cfg.step, cfg.unit).radians};
    if (!(step.radians > 0.0) || step.radians > std::numbers::pi / 8.0 + 1e-12)
        throw usage_error("coarse grid step must lie in (0, 22.5] degrees");
    if (cfg.iters < 0) throw usage_error("refinement iterations must be non-negative");
    const auto result = ineq::maximize_violation(family, corr, step, cfg.iters);
    io::JsonWriter w;
    io::to_json(w, result, cfg.unit);
    return w.str();
}

inline std::string fine_cmd(const RunConfig& cfg) {
    const auto angles = parse_angles(cfg.angles, cfg.unit);
    const auto rep = fine::fine_check(angles[0], angles[1], angles[2]);

    if (cfg.format == "csv") {
        io::CsvWriter csv;
        std::vector<std::string> cols = {"t1", "t2",   "t3",          "feasible",
                                         "d_lo", "d_hi", "certificate", "violated_any_pivot"};
        csv.header(cols);
        std::vector<std::string> cells;
        for (double a : cfg.angles) cells.push_back(csv.cell(a));
        cells.push_back(rep.feasible ? "1" : "0");
        cells.push_back(rep.interval ? csv.cell(rep.interval->lo) : "");
        cells.push_back(rep.interval ? csv.cell(rep.interval->hi) : "");
        cells.push_back(rep.certificate.value_or(""));
        cells.push_back(rep.bell_violated_any_pivot ? "1" : "0");
        csv.row(cells);
        return csv.str();
    }

    // the two physically computable triple-moment candidates, for comparison
    // with the admissible interval (the reduced single-spin state is I/2)
    const auto mixed = spinalg::DensityMatrix<2>::maximally_mixed();
    const io::TripleMomentCandidates candidates{
        scenarios::triple_operator_correlator(mixed, angles[0], angles[1], angles[2]).real(),
        scenarios::triple_chain_correlation(mixed, angles[0], angles[1], angles[2])};
    io::JsonWriter w;
    io::to_json(w, rep, cfg.unit, candidates);
    return w.str();
}

inline std::string fine_chsh_cmd(const RunConfig& cfg) {
    if (!cfg.correlations.empty() && !cfg.angles.empty())
        throw usage_error("fine-chsh takes --correlations or --angles, not both");
    std::vector<double> c = cfg.correlations;
    if (c.empty() && cfg.angles.size() == 4) {
        const auto angles = parse_angles(cfg.angles, cfg.unit);
        c = {scenarios::bell_correlation(angles[0], angles[2]),
             scenarios::bell_correlation(angles[0], angles[3]),
             scenarios::bell_correlation(angles[1], angles[2]),
             scenarios::bell_correlation(angles[1], angles[3])};
    }
    if (c.size() != 4)
        throw usage_error("fine-chsh needs --correlations c_ab c_ab' c_a'b c_a'b' or --angles a a' b b'");
    for (double v : c)
        if (!(std::abs(v) <= 1.0)) throw usage_error("correlation inputs must lie in [-1, 1]");
    const auto rep = fine::chsh_joint_feasible(c[0], c[1], c[2], c[3]);
    io::JsonWriter w;
    io::to_json(w, rep, cfg.unit);
    return w.str();
}

inline std::string lhv_cmd(const RunConfig& cfg) {
    const auto angles = parse_angles(cfg.angles, cfg.unit);
    lhv::LhvModel model;
    if (cfg.kind == "planar" || cfg.kind.empty())
        model.geometry = lhv::Geometry::planar;
    else if (cfg.kind == "spherical")
        model.geometry = lhv::Geometry::spherical;
    else
        throw usage_error("unknown geometry '" + cfg.kind + "' (expected planar|spherical)");
    if (cfg.source == "anti" || cfg.source == "singlet")
        model.pairing = lhv::Pairing::anti_pair;
    else if (cfg.source == "same")
        model.pairing = lhv::Pairing::same_spin;
    else
        throw usage_error("unknown pairing '" + cfg.source + "' (expected anti|same)");

    if (cfg.samples) {
        if (*cfg.samples < 1) throw usage_error("sample count must be at least 1");
        return record_report(lhv::lhv_correlation_mc(model, angles[0], angles[1], *cfg.samples,
                                                     cfg.seed, cfg.threads),
                             cfg);
    }
    const scenarios::CorrelationRecord rec{
        scenarios::Scenario::lhv_pair,
        {angles[0], angles[1]},
        spinalg::cplx{lhv::lhv_correlation_exact(model, angles[0], angles[1])},
        scenarios::Method::exact,
        std::nullopt,
        std::nullopt};
    return record_report(rec, cfg);
}

inline std::string optics_cmd(const RunConfig& cfg) {
    if (!(cfg.i0 >= 0.0) || !std::isfinite(cfg.i0)) throw usage_error("bad input intensity");
    const auto angles = parse_angles(cfg.angles, cfg.unit);
    io::JsonWriter w;
    if (cfg.kind == "malus") {
        w.begin_object();
        w.key("i_in").value(cfg.i0);
        w.key("delta").value(cfg.angles[0]);
        w.key("unit").value(io::unit_name(cfg.unit));
        w.key("i_out").value(optics::malus(cfg.i0, angles[0]));
        w.end_object();
        return w.str();
    }
    if (cfg.kind == "cascade") {
        const auto set = optics::pbs_cascade(cfg.i0, angles[0], angles[1]);
        w.begin_object();
        w.key("theta1").value(cfg.angles[0]);
        w.key("theta2").value(cfg.angles[1]);
        w.key("unit").value(io::unit_name(cfg.unit));
        w.key("intensities");
        io::to_json(w, set);
        w.key("correlation").value(optics::pbs_correlation(cfg.i0, angles[0], angles[1]));
        w.end_object();
        return w.str();
    }
    if (cfg.kind == "chain") {
        w.begin_object();
        w.key("t1").value(cfg.angles[0]);
        w.key("t2").value(cfg.angles[1]);
        w.key("t3").value(cfg.angles[2]);
        w.key("unit").value(io::unit_name(cfg.unit));
        w.key("i_out").value(optics::three_filter_chain(cfg.i0, angles[0], angles[1], angles[2]));
        w.end_object();
        return w.str();
    }
    if (cfg.kind == "sweep-cascade" || cfg.kind == "sweep-chain") {
        const double unit_default = cfg.unit == AngleUnit::deg ? 1.0 : std::numbers::pi / 180.0;
        const double step = cfg.step < 0.0 ? unit_default : cfg.step;
        const double sweep_to =
            cfg.to < 0.0 ? (cfg.unit == AngleUnit::deg ? 180.0 : std::numbers::pi) : cfg.to;
        if (!(step > 0.0) || !(sweep_to > cfg.from)) throw usage_error("bad sweep range or step");
        io::CsvWriter csv;
        if (cfg.kind == "sweep-cascade") {
            std::vector<std::string> cols = {"delta", "i_pp", "i_pm", "i_mp", "i_mm",
                                             "correlation"};
            csv.header(cols);
            for (double d = cfg.from; d < sweep_to - 1e-12; d += step) {
                const Angle delta = parse_angle(d, cfg.unit);
                const auto set = optics::pbs_cascade(cfg.i0, Angle{0.0}, delta);
                std::vector<std::string> cells = {
                    csv.cell(d),         csv.cell(set.i_pp), csv.cell(set.i_pm),
                    csv.cell(set.i_mp),  csv.cell(set.i_mm),
                    csv.cell(optics::pbs_correlation(cfg.i0, Angle{0.0}, delta))};
                csv.row(cells);
            }
        } else {
            std::vector<std::string> cols = {"t2", "t3", "i_out"};
            csv.header(cols);
            for (double d = cfg.from; d < sweep_to - 1e-12; d += step) {
                const Angle t2 = parse_angle(d, cfg.unit);
                const Angle t3 = parse_angle(2 * d, cfg.unit);
                std::vector<std::string> cells = {
                    csv.cell(d), csv.cell(2 * d),
                    csv.cell(optics::three_filter_chain(cfg.i0, Angle{0.0}, t2, t3))};
                csv.row(cells);
            }
        }
        return csv.str();
    }
    throw usage_error("unknown optics command '" + cfg.kind + "'");
}

inline std::string demo_coins_cmd(const RunConfig&) {
    const auto joint = prob::coin_machine();
    const prob::Event a_heads{0, prob::Outcome::plus};
    const prob::Event b_tails{1, prob::Outcome::minus};
    const auto fact = prob::factorisation_check(joint, a_heads, b_tails);
    const auto comp = prob::completeness_check(joint, 0);
    io::JsonWriter w;
    w.begin_object();
    w.key("joint");
    io::to_json(w, joint);
    w.key("p_a").value(prob::event_probability(joint, a_heads));
    w.key("conditional_a_given_b").value(
        prob::conditional(joint, 0, prob::Outcome::plus, 1, prob::Outcome::minus));
    w.key("p_ab").value(fact.p_ab);
    w.key("p_a_p_b").value(fact.p_a_p_b);
    w.key("factorises").value(fact.factorises);
    w.key("completeness_lhs").value(comp.lhs);
    w.key("completeness_rhs").value(comp.rhs);
    w.key("completeness_holds").value(comp.holds);
    w.key("correlation").value(prob::pairwise_correlation(joint, 0, 1));
    w.end_object();
    return w.str();
}

inline std::string dispatch(const RunConfig& cfg) {
    if (cfg.format != "json" && cfg.format != "csv")
        throw usage_error("unknown format '" + cfg.format + "' (expected json|csv)");
    if (cfg.command == "correlate") return correlate_cmd(cfg);
    if (cfg.command == "equivalence") return equivalence_cmd(cfg);
    if (cfg.command == "scan-bell") return scan_bell_cmd(cfg);
    if (cfg.command == "scan-chsh") return scan_chsh_cmd(cfg);
    if (cfg.command == "maximize") return maximize_cmd(cfg);
    if (cfg.command == "fine") return fine_cmd(cfg);
    if (cfg.command == "fine-chsh") return fine_chsh_cmd(cfg);
    if (cfg.command == "lhv") return lhv_cmd(cfg);
    if (cfg.command == "optics") return optics_cmd(cfg);
    if (cfg.command == "demo-coins") return demo_coins_cmd(cfg);
    throw usage_error("unknown subcommand '" + cfg.command + "'");
}

inline void apply_env_overrides(RunConfig& cfg) {
    if (const char* v = std::getenv("QCORR_THREADS")) {
        const long t = std::strtol(v, nullptr, 10);
        if (t >= 1 && t <= 256) cfg.threads = static_cast<unsigned>(t);
    }
    if (const char* v = std::getenv("QCORR_EQ_TOL")) tolerances().equality = std::strtod(v, nullptr);
    if (const char* v = std::getenv("QCORR_PSD_TOL")) tolerances().psd = std::strtod(v, nullptr);
    if (const char* v = std::getenv("QCORR_FEAS_TOL"))
        tolerances().feasibility = std::strtod(v, nullptr);
}

}  // namespace detail

/// Run a full CLI invocation. Writes the report to `out` (or the --output
/// file) and diagnostics to `err`. Returns the process exit code: 0 success,
/// 2 argument errors, 1 internal failures.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    RunConfig cfg;

    CLI::App app{"quantum correlation laboratory"};
    app.require_subcommand(1);

    std::string unit = "deg";
    app.add_option("--unit", unit, "angle unit for inputs and outputs (deg|rad)")
        ->check(CLI::IsMember({"deg", "rad"}));
    app.add_option("--format", cfg.format, "output format (json|csv)")
        ->check(CLI::IsMember({"json", "csv"}));
    std::string output_path;
    app.add_option("--output", output_path, "write the report to a file instead of stdout");
    app.add_option("--seed", cfg.seed, "seed for every stochastic subcommand");

    auto* correlate = app.add_subcommand("correlate", "correlation of a scenario at given angles");
    correlate->add_option("scenario", cfg.scenario,
                          "bell|sequential|product|culled|triple-operator|triple-chain")
        ->required();
    correlate->add_option("angles", cfg.angles, "measurement angles")->expected(2, 3);
    correlate->add_option("--samples", cfg.samples, "estimate stochastically from this many draws");
    correlate->add_option("--state", cfg.state, "initial spin state for the chain scenarios "
                                                "(mixed|up-z|up-x|up-y)");
    correlate->add_flag("--batch", cfg.batch, "emit the raw outcome tuples instead of the record");

    auto* equivalence =
        app.add_subcommand("equivalence", "entangled-pair vs sequential-chain cross-check");
    equivalence->add_option("angles", cfg.angles, "theta phi")->expected(2);

    auto* scan_bell = app.add_subcommand("scan-bell", "grid scan of the three-angle inequality");
    scan_bell->add_option("--source", cfg.source, "singlet|product|lhv-anti|lhv-same");
    scan_bell->add_option("--step", cfg.step, "grid step (input unit)");
    scan_bell->add_option("--from", cfg.from, "grid start");
    scan_bell->add_option("--to", cfg.to, "grid end (exclusive)");

    auto* scan_chsh = app.add_subcommand("scan-chsh", "grid scan of the four-setting expression");
    scan_chsh->add_option("--source", cfg.source, "singlet|product|lhv-anti|lhv-same");
    scan_chsh->add_option("--step", cfg.step, "grid step (input unit)");
    scan_chsh->add_option("--from", cfg.from, "grid start");
    scan_chsh->add_option("--to", cfg.to, "grid end (exclusive)");

    auto* maximize = app.add_subcommand("maximize", "search angle space for extremal violation");
    maximize->add_option("--family", cfg.family, "bell-sum|bell-canonical|chsh");
    maximize->add_option("--source", cfg.source, "singlet|product|lhv-anti|lhv-same");
    maximize->add_option("--step", cfg.step, "coarse grid step (input unit)");
    maximize->add_option("--iters", cfg.iters, "refinement passes");

    auto* fine_cmd_ = app.add_subcommand("fine", "3-spin joint feasibility for an angle triple");
    fine_cmd_->add_option("angles", cfg.angles, "theta1 theta2 theta3")->expected(3);

    auto* fine_chsh = app.add_subcommand("fine-chsh", "4-spin joint feasibility (LP)");
    fine_chsh->add_option("--correlations", cfg.correlations, "c_ab c_ab' c_a'b c_a'b'")
        ->expected(4);
    fine_chsh->add_option("--angles", cfg.angles, "a a' b b' (singlet correlations are derived)")
        ->expected(4);

    auto* lhv_cmd_ = app.add_subcommand("lhv", "sign(n.lambda) hidden-variable model");
    lhv_cmd_->add_option("angles", cfg.angles, "theta phi")->expected(2);
    lhv_cmd_->add_option("--samples", cfg.samples, "Monte Carlo draws (exact value if omitted)");
    lhv_cmd_->add_option("--geometry", cfg.kind, "planar|spherical")->default_str("planar");
    std::string pairing = "anti";
    lhv_cmd_->add_option("--pairing", pairing, "anti|same");

    auto* optics = app.add_subcommand("optics", "Malus-law intensity calculations");
    auto* malus = optics->add_subcommand("malus", "one analyzer");
    malus->add_option("angles", cfg.angles, "delta")->expected(1);
    malus->add_option("--i0", cfg.i0, "input intensity");
    auto* cascade = optics->add_subcommand("cascade", "two-stage beam splitter cascade");
    cascade->add_option("angles", cfg.angles, "theta1 theta2")->expected(2);
    cascade->add_option("--i0", cfg.i0, "input intensity");
    auto* chain = optics->add_subcommand("chain", "three-filter transmission");
    chain->add_option("angles", cfg.angles, "t1 t2 t3")->expected(3);
    chain->add_option("--i0", cfg.i0, "input intensity");
    auto* sweep = optics->add_subcommand("sweep", "CSV intensity curves over an angle sweep");
    std::string sweep_kind = "cascade";
    sweep->add_option("--kind", sweep_kind, "cascade|chain")
        ->check(CLI::IsMember({"cascade", "chain"}));
    sweep->add_option("--step", cfg.step, "sweep step (input unit)");
    sweep->add_option("--from", cfg.from, "sweep start");
    sweep->add_option("--to", cfg.to, "sweep end (exclusive)");
    sweep->add_option("--i0", cfg.i0, "input intensity");

    app.add_subcommand("demo-coins", "the two-coin machine numbers");

    // global flags may trail the subcommand: let unmatched options climb up
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        sub->fallthrough();
        for (CLI::App* nested : sub->get_subcommands([](const CLI::App*) { return true; }))
            nested->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    cfg.unit = unit == "rad" ? AngleUnit::rad : AngleUnit::deg;
    if (!output_path.empty()) cfg.output = output_path;
    for (const CLI::App* sub : app.get_subcommands()) {
        cfg.command = sub->get_name();
        if (cfg.command == "optics") {
            const auto nested = sub->get_subcommands();
            if (nested.empty()) {
                err << "optics needs one of: malus, cascade, chain, sweep\n";
                return 2;
            }
            cfg.kind = nested.front()->get_name();
            if (cfg.kind == "sweep") cfg.kind = "sweep-" + sweep_kind;
        }
        if (cfg.command == "lhv") {
            cfg.source = pairing;
            if (cfg.kind.empty()) cfg.kind = "planar";
        }
    }

    detail::apply_env_overrides(cfg);

    try {
        std::string report = detail::dispatch(cfg);
        if (report.empty() || report.back() != '\n') report += '\n';
        if (cfg.output) {
            std::ofstream f(*cfg.output, std::ios::binary);
            if (!f) throw usage_error("cannot open output file '" + *cfg.output + "'");
            f << report;
        } else {
            out << report;
        }
        return 0;
    } catch (const usage_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace qcorr::cli

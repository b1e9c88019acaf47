#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcorr/angle.hpp"
#include "qcorr/fine.hpp"
#include "qcorr/inequalities.hpp"
#include "qcorr/optics.hpp"
#include "qcorr/prob.hpp"
#include "qcorr/scenarios.hpp"

namespace qcorr::io {

enum class AngleUnit { deg, rad };

inline std::string unit_name(AngleUnit u) { return u == AngleUnit::deg ? "deg" : "rad"; }

inline double in_unit(Angle a, AngleUnit u) {
    return u == AngleUnit::deg ? a.degrees() : a.radians;
}

/// All numeric output goes through this: 12 significant digits, fixed "%.12g"
/// rendering, so identical values always print identical bytes.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// Minimal streaming JSON writer with insertion-ordered keys. Numbers are
/// rendered by format_number; everything else is plain ASCII.
class JsonWriter {
  public:
    JsonWriter& begin_object() { return open('{'); }
    JsonWriter& end_object() { return close('}'); }
    JsonWriter& begin_array() { return open('['); }
    JsonWriter& end_array() { return close(']'); }

    JsonWriter& key(const std::string& k) {
        separate();
        out_ += '"';
        escape(k);
        out_ += "\":";
        just_keyed_ = true;
        return *this;
    }

    JsonWriter& value(double v) { return raw(format_number(v)); }
    JsonWriter& value(int v) { return raw(std::to_string(v)); }
    JsonWriter& value(long long v) { return raw(std::to_string(v)); }
    JsonWriter& value(unsigned long v) { return raw(std::to_string(v)); }
    JsonWriter& value(unsigned long long v) { return raw(std::to_string(v)); }
    JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
    JsonWriter& null() { return raw("null"); }

    JsonWriter& value(const std::string& s) {
        separate();
        out_ += '"';
        escape(s);
        out_ += '"';
        return *this;
    }

    JsonWriter& value(const char* s) { return value(std::string(s)); }

    template <class T>
    JsonWriter& value(const std::optional<T>& v) {
        if (v) return value(*v);
        return null();
    }

    JsonWriter& numbers(std::span<const double> vs) {
        begin_array();
        for (double v : vs) value(v);
        return end_array();
    }

    [[nodiscard]] const std::string& str() const { return out_; }

  private:
    JsonWriter& open(char c) {
        separate();
        out_ += c;
        fresh_ = true;
        return *this;
    }

    JsonWriter& close(char c) {
        out_ += c;
        fresh_ = false;
        return *this;
    }

    JsonWriter& raw(const std::string& s) {
        separate();
        out_ += s;
        return *this;
    }

    void separate() {
        if (just_keyed_) {
            just_keyed_ = false;
            return;
        }
        if (!fresh_ && !out_.empty() && out_.back() != '{' && out_.back() != '[') out_ += ',';
        fresh_ = false;
    }

    void escape(const std::string& s) {
        for (char c : s) {
            if (c == '"' || c == '\\') {
                out_ += '\\';
                out_ += c;
            } else if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                out_ += buf;
            } else {
                out_ += c;
            }
        }
    }

    std::string out_;
    bool fresh_ = true;
    bool just_keyed_ = false;
};

/// CSV with a fixed header row; numeric cells use format_number.
class CsvWriter {
  public:
    void header(std::span<const std::string> cols) {
        emit_row(cols);
    }

    void row(std::span<const std::string> cells) { emit_row(cells); }

    std::string cell(double v) { return format_number(v); }

    [[nodiscard]] const std::string& str() const { return out_; }

  private:
    void emit_row(std::span<const std::string> cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ += ',';
            out_ += cells[i];
        }
        out_ += '\n';
    }

    std::string out_;
};

// ---------------------------------------------------------------------------
// Serializers
// ---------------------------------------------------------------------------

inline void write_angles(JsonWriter& w, std::span<const Angle> angles, AngleUnit unit) {
    w.key("angles").begin_array();
    for (Angle a : angles) w.value(in_unit(a, unit));
    w.end_array();
    w.key("unit").value(unit_name(unit));
}

inline void to_json(JsonWriter& w, const scenarios::CorrelationRecord& r, AngleUnit unit) {
    w.begin_object();
    w.key("scenario").value(scenarios::scenario_name(r.scenario));
    write_angles(w, r.angles, unit);
    w.key("value").begin_object();
    w.key("re").value(r.value.real());
    w.key("im").value(r.value.imag());
    w.end_object();
    w.key("method").value(r.method == scenarios::Method::exact ? "exact" : "sampled");
    w.key("samples").value(r.samples);
    w.key("seed").value(r.seed);
    w.end_object();
}

inline void to_json(JsonWriter& w, const scenarios::SampleBatch& b, AngleUnit unit) {
    w.begin_object();
    w.key("scenario").value(scenarios::scenario_name(b.scenario));
    write_angles(w, b.angles, unit);
    w.key("seed").value(b.seed);
    w.key("count").value(b.outcomes.size());
    w.key("outcomes").begin_array();
    for (const auto& row : b.outcomes) {
        w.begin_array();
        for (int v = 0; v < b.arity; ++v) w.value(row[v]);
        w.end_array();
    }
    w.end_array();
    w.end_object();
}

inline std::string to_csv(const scenarios::SampleBatch& b) {
    CsvWriter csv;
    std::vector<std::string> cols;
    for (int v = 0; v < b.arity; ++v) cols.push_back("s" + std::to_string(v + 1));
    csv.header(cols);
    for (const auto& row : b.outcomes) {
        std::vector<std::string> cells;
        for (int v = 0; v < b.arity; ++v) cells.push_back(std::to_string(row[v]));
        csv.row(cells);
    }
    return csv.str();
}

inline void to_json(JsonWriter& w, const prob::JointDistribution& j) {
    w.begin_object();
    w.key("n").value(j.n());
    w.key("p").begin_array();
    for (std::size_t i = 0; i < j.size(); ++i) w.value(j.entry(i));
    w.end_array();
    w.end_object();
}

inline void to_json(JsonWriter& w, const ineq::BellReport& r, AngleUnit unit) {
    w.begin_object();
    write_angles(w, r.angles, unit);
    w.key("sum_expression").value(r.sum_expression);
    w.key("canonical_lhs").value(r.canonical_lhs);
    w.key("canonical_rhs").value(r.canonical_rhs);
    w.key("violated_canonical").value(r.violated_canonical);
    w.key("within_sum_bounds").value(r.within_sum_bounds);
    w.end_object();
}

inline void to_json(JsonWriter& w, const ineq::ChshReport& r, AngleUnit unit) {
    w.begin_object();
    w.key("settings").begin_array();
    for (Angle a : r.settings) w.value(in_unit(a, unit));
    w.end_array();
    w.key("unit").value(unit_name(unit));
    w.key("s_value").value(r.s_value);
    w.key("violated").value(r.violated);
    w.end_object();
}

inline void to_json(JsonWriter& w, const ineq::SearchResult& r, AngleUnit unit) {
    w.begin_object();
    w.key("family").value(ineq::family_name(r.family));
    write_angles(w, r.angles, unit);
    w.key("objective").value(r.objective);
    w.key("violation").value(r.violation);
    w.end_object();
}

inline void to_json(JsonWriter& w, const fine::MarginalSet& m) {
    w.begin_object();
    w.key("n").value(m.n);
    w.key("b").numbers(m.b);
    w.key("c").numbers(m.c);
    w.key("d").value(m.d);
    w.end_object();
}

/// Physically computable triple-moment candidates shown next to the
/// admissible interval in three-spin reports.
struct TripleMomentCandidates {
    double operator_value = 0.0;
    double chain_value = 0.0;
};

inline void to_json(JsonWriter& w, const fine::FeasibilityReport& r, AngleUnit unit,
                    const std::optional<TripleMomentCandidates>& candidates = std::nullopt) {
    w.begin_object();
    w.key("feasible").value(r.feasible);
    w.key("marginals");
    to_json(w, r.marginals);
    w.key("d_interval");
    if (r.interval) {
        w.begin_array().value(r.interval->lo).value(r.interval->hi).end_array();
    } else {
        w.null();
    }
    w.key("witness");
    if (r.witness) {
        to_json(w, *r.witness);
    } else {
        w.null();
    }
    w.key("certificate").value(r.certificate);
    if (r.bell) {
        w.key("bell");
        to_json(w, *r.bell, unit);
        w.key("bell_violated_any_pivot").value(r.bell_violated_any_pivot);
        w.key("fine_equivalence_holds").value(r.fine_equivalence_holds);
    }
    w.key("chsh_max_abs").value(r.chsh_max_abs);
    if (candidates) {
        w.key("d_candidates").begin_object();
        w.key("operator").value(candidates->operator_value);
        w.key("chain").value(candidates->chain_value);
        w.end_object();
    }
    w.end_object();
}

inline void to_json(JsonWriter& w, const optics::IntensitySet& s) {
    w.begin_object();
    w.key("i0").value(s.i0);
    w.key("i_pp").value(s.i_pp);
    w.key("i_pm").value(s.i_pm);
    w.key("i_mp").value(s.i_mp);
    w.key("i_mm").value(s.i_mm);
    w.end_object();
}

inline void to_json(JsonWriter& w, const scenarios::EquivalenceReport& r, Angle theta, Angle phi,
                    AngleUnit unit) {
    w.begin_object();
    w.key("theta").value(in_unit(theta, unit));
    w.key("phi").value(in_unit(phi, unit));
    w.key("unit").value(unit_name(unit));
    w.key("c_ab").value(r.c_ab);
    w.key("c_bb").value(r.c_bb);
    w.key("max_conditional_diff").value(r.max_conditional_diff);
    w.key("matches").value(r.matches);
    w.end_object();
}

}  // namespace qcorr::io

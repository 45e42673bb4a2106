#include "lambda_decouple/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "lambda_decouple/errors.hpp"
#include "lambda_decouple/format.hpp"

namespace lambda_decouple {

namespace {

constexpr PulseLabel kCyclePattern[kEventsPerCycle] = {PulseLabel::h1, PulseLabel::h1_dag,
                                                        PulseLabel::h2, PulseLabel::h2_dag};
// Nominal position of each pulse inside cycle c, in units of dt after 3(c-1) dt.
constexpr int kCycleOffset[kEventsPerCycle] = {1, 2, 2, 3};

bool times_match(double a, double b, double scale) {
    return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(scale));
}

double parse_double(std::string_view text, const char* what) {
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw InvalidInput(std::string("schedule dump: cannot parse ") + what + " from '" +
                           std::string(text) + "'");
    }
    return v;
}

} // namespace

std::string_view to_string(PulseLabel label) {
    switch (label) {
    case PulseLabel::h1: return "h1";
    case PulseLabel::h1_dag: return "h1_dag";
    case PulseLabel::h2: return "h2";
    case PulseLabel::h2_dag: return "h2_dag";
    }
    return "?";
}

std::optional<PulseLabel> parse_pulse_label(std::string_view text) {
    for (PulseLabel l : kCyclePattern) {
        if (to_string(l) == text) {
            return l;
        }
    }
    return std::nullopt;
}

Operator3 pulse_unitary(PulseLabel label) {
    switch (label) {
    case PulseLabel::h1: return build_bb_element(BangBang::h1);
    case PulseLabel::h1_dag: return build_bb_element(BangBang::h1).adjoint();
    case PulseLabel::h2: return build_bb_element(BangBang::h2);
    case PulseLabel::h2_dag: return build_bb_element(BangBang::h2).adjoint();
    }
    throw InvalidInput("pulse_unitary: unknown label");
}

CycleSchedule build_schedule(double delta_t, int n_cycles, double tau_p) {
    if (!(delta_t > 0.0) || !std::isfinite(delta_t)) {
        throw InvalidInput("build_schedule: delta_t must be positive and finite");
    }
    if (n_cycles < 0) {
        throw InvalidInput("build_schedule: n_cycles must be non-negative");
    }
    if (!(tau_p >= 0.0) || !std::isfinite(tau_p)) {
        throw InvalidInput("build_schedule: tau_p must be non-negative and finite");
    }
    CycleSchedule s{delta_t, n_cycles, tau_p, {}};
    s.events.reserve(static_cast<std::size_t>(kEventsPerCycle) * n_cycles);
    for (int c = 1; c <= n_cycles; ++c) {
        for (int k = 0; k < kEventsPerCycle; ++k) {
            s.events.push_back({(3 * (c - 1) + kCycleOffset[k]) * delta_t, kCyclePattern[k], tau_p});
        }
    }
    return s;
}

std::vector<ScheduleViolation> validate_schedule(const CycleSchedule& s) {
    std::vector<ScheduleViolation> out;
    const std::size_t n_events = s.events.size();
    if (!(s.delta_t > 0.0) || s.n_cycles < 0 || !(s.tau_p >= 0.0)) {
        out.push_back({n_events, "parameters",
                       "require delta_t > 0, n_cycles >= 0, tau_p >= 0"});
        return out;
    }

    for (std::size_t i = 0; i < n_events; ++i) {
        if (!(s.events[i].time >= 0.0)) {
            out.push_back({i, "timing", "negative event time"});
        }
        if (i > 0 && s.events[i].time < s.events[i - 1].time &&
            !times_match(s.events[i].time, s.events[i - 1].time, s.duration())) {
            out.push_back({i, "ordering", "event times decrease"});
        }
    }

    const std::size_t expected = static_cast<std::size_t>(kEventsPerCycle) * s.n_cycles;
    if (n_events != expected) {
        out.push_back({n_events, "cardinality",
                       "expected " + std::to_string(expected) + " events, found " +
                           std::to_string(n_events)});
    }

    // Bucket events into cycles: cycle c owns ((c-1)*3dt, c*3dt].
    const double period = s.cycle_length();
    std::vector<std::vector<std::size_t>> buckets(static_cast<std::size_t>(s.n_cycles));
    for (std::size_t i = 0; i < n_events; ++i) {
        const double t = s.events[i].time;
        long c = static_cast<long>(std::ceil(t / period - 1e-9));
        if (c < 1 || c > s.n_cycles) {
            out.push_back({i, "timing", "event outside the scheduled cycles"});
            continue;
        }
        buckets[static_cast<std::size_t>(c - 1)].push_back(i);
    }

    for (std::size_t c = 0; c < buckets.size(); ++c) {
        const auto& idx = buckets[c];
        const std::string cycle_name = "cycle " + std::to_string(c + 1);
        if (idx.size() != static_cast<std::size_t>(kEventsPerCycle)) {
            out.push_back({idx.empty() ? n_events : idx.front(), "cardinality",
                           cycle_name + " has " + std::to_string(idx.size()) + " events, expected 4"});
            continue;
        }
        std::vector<PulseLabel> labels;
        for (std::size_t i : idx) {
            labels.push_back(s.events[i].element);
        }
        if (!std::is_permutation(labels.begin(), labels.end(), std::begin(kCyclePattern))) {
            out.push_back({idx.front(), "label", cycle_name + " does not contain h1, h1_dag, h2, h2_dag once each"});
        } else {
            for (int k = 0; k < kEventsPerCycle; ++k) {
                if (labels[static_cast<std::size_t>(k)] != kCyclePattern[k]) {
                    out.push_back({idx[static_cast<std::size_t>(k)], "ordering",
                                   cycle_name + " pulse order differs from h1, h1_dag, h2, h2_dag"});
                    break;
                }
            }
        }
        for (int k = 0; k < kEventsPerCycle; ++k) {
            const std::size_t i = idx[static_cast<std::size_t>(k)];
            const double nominal = (3.0 * static_cast<double>(c) + kCycleOffset[k]) * s.delta_t;
            if (!times_match(s.events[i].time, nominal, s.duration())) {
                out.push_back({i, "timing", cycle_name + " event at " +
                                                format_significant(s.events[i].time, 12) +
                                                ", expected " + format_significant(nominal, 12)});
            }
        }
    }
    return out;
}

Operator3 net_cycle_unitary(const CycleSchedule& s, int n_pulses) {
    if (s.n_cycles < 1) {
        throw InvalidInput("net_cycle_unitary: schedule has no cycles");
    }
    if (n_pulses < 0 || n_pulses > kEventsPerCycle ||
        static_cast<std::size_t>(n_pulses) > s.events.size()) {
        throw InvalidInput("net_cycle_unitary: pulse count out of range");
    }
    Operator3 u = Operator3::Identity();
    for (int k = 0; k < n_pulses; ++k) {
        u = pulse_unitary(s.events[static_cast<std::size_t>(k)].element) * u;
    }
    return u;
}

std::string dump_schedule(const CycleSchedule& s) {
    std::ostringstream os;
    os << "# delta_t=" << format_significant(s.delta_t, 12) << " n_cycles=" << s.n_cycles
       << " tau_p=" << format_significant(s.tau_p, 12) << '\n';
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        const auto& e = s.events[i];
        os << i << '\t' << format_significant(e.time, 12) << '\t' << to_string(e.element) << '\t'
           << format_significant(e.width_meta, 12) << '\n';
    }
    return os.str();
}

CycleSchedule parse_schedule_dump(std::string_view text) {
    CycleSchedule s;
    bool have_header = false;
    std::istringstream is{std::string(text)};
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            if (have_header) {
                continue;
            }
            std::istringstream hs(line.substr(1));
            std::string tok;
            int seen = 0;
            while (hs >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) {
                    throw InvalidInput("schedule dump: malformed header token '" + tok + "'");
                }
                const std::string key = tok.substr(0, eq);
                const std::string_view val = std::string_view(tok).substr(eq + 1);
                if (key == "delta_t") {
                    s.delta_t = parse_double(val, "delta_t");
                    ++seen;
                } else if (key == "n_cycles") {
                    s.n_cycles = static_cast<int>(parse_double(val, "n_cycles"));
                    ++seen;
                } else if (key == "tau_p") {
                    s.tau_p = parse_double(val, "tau_p");
                    ++seen;
                }
            }
            if (seen != 3) {
                throw InvalidInput("schedule dump: header must carry delta_t, n_cycles and tau_p");
            }
            have_header = true;
            continue;
        }
        if (!have_header) {
            throw InvalidInput("schedule dump: event line before header");
        }
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, '\t')) {
            fields.push_back(f);
        }
        if (fields.size() != 4) {
            throw InvalidInput("schedule dump: expected 4 tab-separated fields in '" + line + "'");
        }
        const auto label = parse_pulse_label(fields[2]);
        if (!label) {
            throw InvalidInput("schedule dump: unknown pulse label '" + fields[2] + "'");
        }
        s.events.push_back({parse_double(fields[1], "time"), *label, parse_double(fields[3], "tau_p")});
    }
    if (!have_header) {
        throw InvalidInput("schedule dump: missing header line");
    }
    return s;
}

} // namespace lambda_decouple

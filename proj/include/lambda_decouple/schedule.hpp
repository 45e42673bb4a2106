// schedule.hpp: periodic twinborn-pulse timeline
//
// One cycle of length 3*dt: free dt, h1, free dt, h1^dagger then h2
// back-to-back, free dt, h2^dagger. Pulses are instantaneous; tau_p is
// carried along for dumps only.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lambda_decouple/qutrit.hpp"

namespace lambda_decouple {

enum class PulseLabel { h1, h1_dag, h2, h2_dag };

std::string_view to_string(PulseLabel label);
std::optional<PulseLabel> parse_pulse_label(std::string_view text);

Operator3 pulse_unitary(PulseLabel label);

struct PulseEvent {
    double time = 0.0;
    PulseLabel element = PulseLabel::h1;
    double width_meta = 0.0;

    friend bool operator==(const PulseEvent&, const PulseEvent&) = default;
};

struct CycleSchedule {
    double delta_t = 1.0;
    int n_cycles = 0;
    double tau_p = 0.0;
    std::vector<PulseEvent> events;

    double cycle_length() const noexcept { return 3.0 * delta_t; }
    double duration() const noexcept { return 3.0 * delta_t * n_cycles; }

    friend bool operator==(const CycleSchedule&, const CycleSchedule&) = default;
};

inline constexpr int kEventsPerCycle = 4;

CycleSchedule build_schedule(double delta_t, int n_cycles, double tau_p);

struct ScheduleViolation {
    std::size_t event_index;  // first offending event (events.size() for global rules)
    std::string rule;         // "parameters", "cardinality", "ordering", "timing", "label"
    std::string detail;
};

std::vector<ScheduleViolation> validate_schedule(const CycleSchedule& s);

// Product of the first `n_pulses` pulse unitaries of the first cycle, later
// pulses multiplying from the left. Free evolution is not included.
Operator3 net_cycle_unitary(const CycleSchedule& s, int n_pulses = kEventsPerCycle);

// "# delta_t=<v> n_cycles=<v> tau_p=<v>" then "index\ttime\telement\ttau_p" per event.
std::string dump_schedule(const CycleSchedule& s);
CycleSchedule parse_schedule_dump(std::string_view text);

} // namespace lambda_decouple

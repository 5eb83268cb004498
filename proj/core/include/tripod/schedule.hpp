#pragma once

#include "tripod/atomic_model.hpp"

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace tripod {

enum class PulseShape { Rect, Gauss, RampCos };

PulseShape parse_pulse_shape(std::string_view name);
std::string_view to_string(PulseShape s);

/// One piece of a boundary envelope.
///   rect     constant on [t_start, t_end)
///   gauss    exp(-(t - t_mid)^2 / (2 width^2)) truncated to [t_start, t_end]
///   ramp_cos flat top with raised-cosine edges of duration `width`
struct PulseSegment {
    double t_start = 0.0;
    double t_end = 0.0;
    PulseShape shape = PulseShape::Rect;
    double amplitude = 0.0;  ///< rad/us
    double phase = 0.0;      ///< rad
    double width = 1.0;      ///< us

    Complex value(double t) const;
};

/// Control switch-off / switch-on block. The control is multiplied by a factor
/// that ramps from 1 to 0 over [t_off, t_off + ramp_dur] (cos^2), stays 0 for
/// t_dark, then ramps to read_scale over the next ramp_dur (sin^2).
struct StorageBlock {
    double t_off = 0.0;
    double ramp_dur = 1.0;
    double t_dark = 0.0;
    double read_scale = 1.0;

    double dark_start() const { return t_off + ramp_dur; }
    double t_on() const { return t_off + ramp_dur + t_dark; }
    double read_start() const { return t_on() + ramp_dur; }
    double factor(double t) const;
};

struct PulseSchedule {
    std::array<std::vector<PulseSegment>, kFieldCount> segments;
    std::optional<StorageBlock> storage;

    std::vector<PulseSegment>& field(FieldId f) { return segments[static_cast<int>(f)]; }
    const std::vector<PulseSegment>& field(FieldId f) const { return segments[static_cast<int>(f)]; }

    /// Boundary envelope at z = 0 (the control includes the storage factor).
    Complex value(FieldId f, double t) const;
    double peak_amplitude(FieldId f) const;
    /// Shortest edge or ramp duration present, infinity when there is none.
    double shortest_ramp() const;

    /// Throws InvalidArgument if segments overlap or the storage block is invalid.
    void validate() const;
};

}  // namespace tripod

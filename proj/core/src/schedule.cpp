#include "tripod/schedule.hpp"

#include "tripod/errors.hpp"
#include "tripod/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tripod {

PulseShape parse_pulse_shape(std::string_view name) {
    if (name == "rect") return PulseShape::Rect;
    if (name == "gauss") return PulseShape::Gauss;
    if (name == "ramp_cos") return PulseShape::RampCos;
    throw InvalidArgument("unknown pulse shape '" + std::string(name) + "'");
}

std::string_view to_string(PulseShape s) {
    switch (s) {
        case PulseShape::Rect: return "rect";
        case PulseShape::Gauss: return "gauss";
        case PulseShape::RampCos: return "ramp_cos";
    }
    return "?";
}

Complex PulseSegment::value(double t) const {
    if (t < t_start || t > t_end) return {};
    double envelope = 0.0;
    switch (shape) {
        case PulseShape::Rect:
            envelope = t < t_end ? 1.0 : 0.0;
            break;
        case PulseShape::Gauss: {
            const double mid = 0.5 * (t_start + t_end);
            envelope = std::exp(-0.5 * std::pow((t - mid) / width, 2));
            break;
        }
        case PulseShape::RampCos: {
            const double rise = t - t_start;
            const double fall = t_end - t;
            if (rise < width)
                envelope = std::pow(std::sin(0.5 * units::pi * rise / width), 2);
            else if (fall < width)
                envelope = std::pow(std::sin(0.5 * units::pi * fall / width), 2);
            else
                envelope = 1.0;
            break;
        }
    }
    return std::polar(amplitude * envelope, phase);
}

double StorageBlock::factor(double t) const {
    if (t <= t_off) return 1.0;
    if (t < dark_start()) return std::pow(std::cos(0.5 * units::pi * (t - t_off) / ramp_dur), 2);
    if (t <= t_on()) return 0.0;
    if (t < read_start()) return read_scale * std::pow(std::sin(0.5 * units::pi * (t - t_on()) / ramp_dur), 2);
    return read_scale;
}

Complex PulseSchedule::value(FieldId f, double t) const {
    Complex v{};
    for (const auto& seg : field(f)) v += seg.value(t);
    if (f == FieldId::Control && storage) v *= storage->factor(t);
    return v;
}

double PulseSchedule::peak_amplitude(FieldId f) const {
    double peak = 0.0;
    for (const auto& seg : field(f)) peak = std::max(peak, std::abs(seg.amplitude));
    return peak;
}

double PulseSchedule::shortest_ramp() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& segs : segments)
        for (const auto& seg : segs)
            if (seg.shape != PulseShape::Rect) r = std::min(r, seg.width);
    if (storage) r = std::min(r, storage->ramp_dur);
    return r;
}

void PulseSchedule::validate() const {
    for (int f = 0; f < kFieldCount; ++f) {
        auto segs = segments[f];
        std::sort(segs.begin(), segs.end(),
                  [](const PulseSegment& a, const PulseSegment& b) { return a.t_start < b.t_start; });
        for (std::size_t i = 0; i < segs.size(); ++i) {
            if (!(segs[i].t_end > segs[i].t_start)) throw InvalidArgument("pulse segment has t_end <= t_start");
            if (segs[i].shape != PulseShape::Rect && !(segs[i].width > 0.0))
                throw InvalidArgument("pulse segment width must be positive");
            if (segs[i].shape == PulseShape::RampCos && 2.0 * segs[i].width > segs[i].t_end - segs[i].t_start)
                throw InvalidArgument("ramp_cos segment shorter than its two edges");
            if (i > 0 && segs[i].t_start < segs[i - 1].t_end)
                throw InvalidArgument("pulse segments overlap on field " + std::to_string(f));
        }
    }
    if (storage) {
        if (!(storage->ramp_dur > 0.0)) throw InvalidArgument("storage ramp_dur must be positive");
        if (storage->t_dark < 0.0) throw InvalidArgument("storage t_dark must be nonnegative");
        if (storage->read_scale < 0.0) throw InvalidArgument("storage read_scale must be nonnegative");
    }
}

}  // namespace tripod

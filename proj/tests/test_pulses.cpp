#include <doctest.h>

#include "eitfwm/pulses.hpp"

using namespace eitfwm;

TEST_CASE("bandwidth and fwhm are inverse") {
    PulseSpec p;
    p.fwhm = 6.6;
    CHECK(fwhm_for_bandwidth(pulse_bandwidth(p)) == doctest::Approx(6.6));
    CHECK(pulse_bandwidth(p) == doctest::Approx(2 * std::log(2.0) / (std::numbers::pi * 6.6)));
}

TEST_CASE("truncated gaussian has intensity fwhm and default window") {
    PulseSpec p;
    p.fwhm = 4;
    p.center = 1;
    CHECK(std::norm(p.envelope(1 + 2)) == doctest::Approx(0.5 * std::norm(p.envelope(1))));
    CHECK(p.window_start() == doctest::Approx(1 - 8));
    CHECK(p.window_end() == doctest::Approx(1 + 8));
    CHECK(p.envelope(10) == cplx{});
}

TEST_CASE("sample_inputs applies the stokes ratio") {
    PulseSpec p;
    p.fwhm = 2;
    p.stokes_ratio = cplx(-0.55, 0.1);
    const auto in = sample_inputs(p, TimeGrid::span(-5, 5, 0.05));
    for (std::size_t i = 0; i < in.grid.n; ++i) CHECK(std::abs(in.stokes[i] - p.stokes_ratio * in.signal[i]) < 1e-15);
}

TEST_CASE("sample_inputs rejects coarse or short grids") {
    PulseSpec p;
    p.fwhm = 1;
    CHECK_THROWS_AS(sample_inputs(p, TimeGrid::span(-3, 3, 0.2)), ValidationError);
    CHECK_THROWS_AS(sample_inputs(p, TimeGrid::span(-1, 3, 0.01)), ValidationError);
}

TEST_CASE("pulse validation") {
    PulseSpec p;
    p.fwhm = -1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
    p.fwhm = 2;
    p.trunc_start = 3;
    p.trunc_end = 1;
    CHECK_THROWS_AS(p.validate(), ValidationError);
}

TEST_CASE("control schedule switches off and on") {
    ControlSchedule s;
    s.omega_write = 5;
    s.omega_read = 7;
    s.t_off = 0;
    s.storage_time = 10;
    CHECK(s.omega(-1) == 5);
    CHECK(s.omega(5) == 0);
    CHECK(s.omega(11) == 7);
    s.switch_model.kind = SwitchModel::linear_ramp;
    s.switch_model.ramp = 1;
    CHECK(s.omega(-0.5) == doctest::Approx(2.5));
    CHECK(s.omega(-1.5) == doctest::Approx(5));
    const Control c = Control::from_schedule(s);
    CHECK(c(-0.5) == doctest::Approx(2.5));
    CHECK(c.max_omega == 7);
}

TEST_CASE("time grid helpers") {
    const TimeGrid g = TimeGrid::span(-1, 1, 0.25);
    CHECK(g.n == 9);
    CHECK(g.t_end() == doctest::Approx(1));
    CHECK(g.index_at_or_after(0.1) == 5);
    CHECK(g.index_at_or_after(5) == 9);
}

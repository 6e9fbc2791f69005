#include <doctest.h>

#include <set>

#include "eitfwm/config.hpp"
#include "eitfwm/presets.hpp"

using namespace eitfwm;

TEST_CASE("every preset parses and names are unique") {
    REQUIRE(presets().size() >= 6);
    std::set<std::string> names;
    for (const auto& p : presets()) {
        CAPTURE(p.name);
        CHECK(names.insert(p.name).second);
        const ExperimentSpec s = parse_spec(p.ini, p.name);
        CHECK_FALSE(s.name.empty());
        CHECK(find_preset(p.name) == &p);
    }
    CHECK(find_preset("nope") == nullptr);
}

TEST_CASE("fig5 preset carries the joint-mode parameters") {
    const ExperimentSpec s = parse_spec(find_preset("fig5")->ini, "fig5");
    CHECK(s.kind == ExperimentKind::joint_mode_study);
    CHECK(s.medium.omega == doctest::Approx(from_mhz(8)));
    CHECK(s.medium.gamma == doctest::Approx(from_mhz(150)));
    REQUIRE(s.bandwidth_ge);
    CHECK(*s.bandwidth_ge == doctest::Approx(0.05));
    CHECK(s.alpha0L_list == std::vector<double>{10, 25, 50, 100});
    const MediumParams m = s.medium_at(50);
    CHECK(m.alpha0L == 50);
    CHECK(m.delta == doctest::Approx(m.light_shift()));
    const PulseSpec p = s.pulse_for(m);
    CHECK(pulse_bandwidth(p) == doctest::Approx(0.05 * derive(m).gamma_E));
}

TEST_CASE("fig6 preset lists the four storage points") {
    const ExperimentSpec s = parse_spec(find_preset("fig6")->ini, "fig6");
    REQUIRE(s.od_points.size() == 4);
    const double a[] = {10, 41, 82, 110}, om[] = {8.3, 7.1, 12.7, 7.8}, fw[] = {6, 6, 20, 20};
    for (int i = 0; i < 4; ++i) {
        CHECK(s.od_points[i].alpha0L == a[i]);
        CHECK(s.od_points[i].omega == doctest::Approx(from_mhz(om[i])));
        CHECK(s.od_points[i].fwhm == fw[i]);
    }
}

TEST_CASE("time grid is aligned and covers the read-out") {
    const ExperimentSpec s = parse_spec(find_preset("fig2")->ini, "fig2");
    const PulseSpec p = s.pulse_for(s.medium);
    const TimeGrid g = s.time_grid(p, s.medium);
    CHECK(std::abs(g.t0 / s.dt - std::round(g.t0 / s.dt)) < 1e-9);
    CHECK(g.t_end() >= s.control.t_on() + s.tail - 1e-9);
}

TEST_CASE("validation errors") {
    const std::string head = "[experiment]\nkind = slow_light\n[pulse]\nfwhm_us = 4\n";
    const auto with = [&](const std::string& medium, const std::string& grid) {
        return head + "[medium]\n" + medium + "\n[grid]\n" + grid + "\n";
    };
    CHECK_NOTHROW(parse_spec(with("alpha0L = 10", "nz = 32"), "t"));
    CHECK_THROWS_AS(parse_spec(with("alpha0L = 10", "bogus = 1"), "t"), ValidationError);
    CHECK_THROWS_AS(parse_spec(with("alpha0L = 10", "nz = 32") + "[extra]\nx = 1\n", "t"), ValidationError);
    CHECK_THROWS_AS(parse_spec("[experiment]\nkind = slow_light\n", "t"), ValidationError);
    CHECK_THROWS_AS(parse_spec("[experiment]\nkind = warp\n[medium]\n[pulse]\n[grid]\n", "t"), ValidationError);
    CHECK_THROWS_AS(parse_spec(with("alpha0L = ten", "nz = 32"), "t"), ValidationError);
    CHECK_THROWS_AS(parse_spec(with("alpha0L = -1", "nz = 32"), "t"), ValidationError);
    CHECK_THROWS_AS(parse_spec(with("alpha0L = 10", "nz = 1"), "t"), ValidationError);
    CHECK_THROWS_AS(parse_spec(with("alpha0L = 10", "dt_us = 0"), "t"), ValidationError);
    try {
        parse_spec("[experiment]\nkind = stored_light\n", "t");
        FAIL("expected a throw");
    } catch (const ValidationError& e) {
        const std::string w = e.what();
        CHECK(w.find("medium") != std::string::npos);
        CHECK(w.find("control") != std::string::npos);
    }
    CHECK_THROWS_AS(load_spec_file("/nonexistent/spec.ini"), ValidationError);
}

TEST_CASE("sweep kinds need their lists") {
    const std::string body = "[medium]\nalpha0L = 10\n[pulse]\nfwhm_us = 4\n[control]\nstorage_time_us = 5\n[grid]\nnz = 32\n";
    CHECK_NOTHROW(parse_spec("[experiment]\nkind = decay_sweep\nstorage_times_us = 1, 2, 3, 4\n" + body, "t"));
    CHECK_THROWS_AS(parse_spec("[experiment]\nkind = decay_sweep\nstorage_times_us = 1, 2, 3\n" + body, "t"), ValidationError);
    CHECK_THROWS_AS(parse_spec("[experiment]\nkind = od_sweep\n" + body, "t"), ValidationError);
    CHECK_THROWS_AS(parse_spec("[experiment]\nkind = sensitivity_study\n" + body, "t"), ValidationError);
}

TEST_CASE("complex values round-trip") {
    CHECK(parse_complex("1") == cplx(1, 0));
    CHECK(parse_complex("-0.55") == cplx(-0.55, 0));
    CHECK(parse_complex("0.5+0.25i") == cplx(0.5, 0.25));
    CHECK(parse_complex("-2i") == cplx(0, -2));
    CHECK(parse_complex("1e-3-4e2j") == cplx(1e-3, -400));
    CHECK_THROWS_AS(parse_complex("one"), ValidationError);
    for (cplx c : {cplx(1, 0), cplx(-0.55, 0), cplx(0.125, -3.5), cplx(0, 2)}) CHECK(parse_complex(format_complex(c)) == c);
}

#include <doctest.h>

#include "inverter.hpp"

#include <cmath>
#include <numbers>
#include <set>

using namespace limsim;

TEST_CASE("switch state enumeration order and distinctness") {
    const auto &states = enumerate_states();
    CHECK(states.size() == 8);
    CHECK(states[0] == SwitchState{1, 0, 0}); // index 1
    CHECK(states[1] == SwitchState{0, 1, 0});
    CHECK(states[2] == SwitchState{0, 0, 1});
    CHECK(states[3] == SwitchState{1, 1, 0});
    CHECK(states[4] == SwitchState{0, 1, 1});
    CHECK(states[5] == SwitchState{1, 0, 1});
    CHECK(states[6] == SwitchState{0, 0, 0}); // index 7
    CHECK(states[7] == SwitchState{1, 1, 1});

    std::set<int> seen;
    for (auto s : states)
        seen.insert(s.u1 * 4 + s.u2 * 2 + s.u3);
    CHECK(seen.size() == 8);
}

TEST_CASE("voltage map") {
    const InverterParams inv{255.0};

    SUBCASE("zero vectors") {
        for (auto u : {SwitchState{0, 0, 0}, SwitchState{1, 1, 1}}) {
            const auto v = voltage(u, inv);
            CHECK(v.V_as == 0.0);
            CHECK(v.V_bs == 0.0);
        }
    }

    SUBCASE("first active vector lies on the alpha axis") {
        const auto v = voltage({1, 0, 0}, inv);
        CHECK(v.V_as == doctest::Approx(inv.Vdc));
        CHECK(v.V_bs == 0.0);
    }

    SUBCASE("complement rule: voltage(~u) == -voltage(u)") {
        for (auto u : enumerate_states()) {
            const SwitchState c{static_cast<uint8_t>(1 - u.u1),
                                static_cast<uint8_t>(1 - u.u2),
                                static_cast<uint8_t>(1 - u.u3)};
            const auto a = voltage(u, inv);
            const auto b = voltage(c, inv);
            CHECK(a.V_as == doctest::Approx(-b.V_as).epsilon(1e-14));
            CHECK(a.V_bs == doctest::Approx(-b.V_bs).epsilon(1e-14));
        }
    }

    SUBCASE("six active vectors: magnitude Vdc, 60 degree spacing") {
        std::set<int> angles;
        for (auto u : enumerate_states()) {
            const auto v = voltage(u, inv);
            const double mag = std::hypot(v.V_as, v.V_bs);
            if (mag == 0.0)
                continue;
            CHECK(mag == doctest::Approx(inv.Vdc).epsilon(1e-12));
            const double deg =
                std::atan2(v.V_bs, v.V_as) * 180.0 / std::numbers::pi;
            const int rounded = static_cast<int>(std::lround(deg));
            CHECK(std::abs(rounded % 60) == 0);
            angles.insert(((rounded % 360) + 360) % 360);
        }
        CHECK(angles.size() == 6);
    }

    SUBCASE("linear in Vdc") {
        const InverterParams half{127.5};
        for (auto u : enumerate_states()) {
            const auto a = voltage(u, inv);
            const auto b = voltage(u, half);
            CHECK(a.V_as == doctest::Approx(2.0 * b.V_as));
            CHECK(a.V_bs == doctest::Approx(2.0 * b.V_bs));
        }
    }
}

TEST_CASE("switch transition counts") {
    const auto &states = enumerate_states();

    SUBCASE("paper table entries") {
        CHECK(switch_count(states[0], states[1]) == 2); // (1,2)
        CHECK(switch_count(states[0], states[4]) == 3); // (1,5)
        for (auto s : states)
            CHECK(switch_count(s, s) == 0);
    }

    SUBCASE("table literal equals Hamming distance for all 64 pairs") {
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                CHECK(kSwitchCountTable[i][j] ==
                      switch_count(states[i], states[j]));
    }

    SUBCASE("symmetry and triangle inequality") {
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) {
                CHECK(switch_count(states[i], states[j]) ==
                      switch_count(states[j], states[i]));
                for (int k = 0; k < 8; ++k)
                    CHECK(switch_count(states[i], states[k]) <=
                          switch_count(states[i], states[j]) +
                              switch_count(states[j], states[k]));
            }
    }
}

TEST_CASE("phase voltages") {
    const InverterParams inv{255.0};
    std::set<double> sums;
    for (auto u : enumerate_states()) {
        const auto pv = phase_voltages(u, inv);
        for (int leg = 0; leg < 3; ++leg)
            CHECK(std::abs(pv[leg]) == doctest::Approx(inv.Vdc / 2.0));
        CHECK(pv[0] == (u.u1 ? inv.Vdc / 2 : -inv.Vdc / 2));
        sums.insert(pv[0] + pv[1] + pv[2]);
    }
    // total over legs takes exactly four values
    CHECK(sums == std::set<double>{-1.5 * inv.Vdc, -0.5 * inv.Vdc,
                                   0.5 * inv.Vdc, 1.5 * inv.Vdc});
}

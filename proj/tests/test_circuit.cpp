#include "doctest.h"
#include "twomode/circuit.hpp"
#include "twomode/errors.hpp"

using namespace twomode;

TEST_CASE("derive_energies matches independent evaluation") {
    // Reference values computed independently from the network formulas.
    auto [ec1, ep1] = derive_energies(100.0, 30.0);
    CHECK(ec1 == doctest::Approx(0.167324543544).epsilon(1e-10));
    CHECK(ep1 == doctest::Approx(0.0815707149778).epsilon(1e-10));

    auto [ec2, ep2] = derive_energies(50.0, 5.0);
    CHECK(ec2 == doctest::Approx(0.358130157714).epsilon(1e-10));
    CHECK(ep2 == doctest::Approx(0.0656571955809).epsilon(1e-10));
}

TEST_CASE("derive_energies limits") {
    // Vanishing coupling capacitance: no cross-charging energy, EC = e^2/2C.
    auto [ec, ep] = derive_energies(80.0, 1e-9);
    CHECK(ep == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(ec == doctest::Approx(kESquaredOverH_GHz_fF / (2.0 * 80.0)).epsilon(1e-6));

    CHECK_THROWS_AS(derive_energies(0.0, 10.0), InvalidParameterError);
    CHECK_THROWS_AS(derive_energies(50.0, -1.0), InvalidParameterError);
}

TEST_CASE("CircuitParams validation and mode charging energies") {
    CircuitParams p = CircuitParams::symmetric_params(11.0, 0.5, 0.2);
    CHECK_NOTHROW(p.validate());
    CHECK(p.ec_sigma() == doctest::Approx(0.6));
    CHECK(p.ec_delta() == doctest::Approx(0.4));
    CHECK(p.symmetric());

    CircuitParams bad = p;
    bad.ep = 1.2;  // >= 2 EC makes the Delta mode unstable
    CHECK_THROWS_AS(bad.validate(), InvalidParameterError);
    bad = p;
    bad.ej1 = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidParameterError);
}

TEST_CASE("ChargeConfig sum/difference round trip and parity shifts") {
    const ChargeConfig c = ChargeConfig::from_sum_diff(0.37, 0.11);
    CHECK(c.ng_sigma() == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(c.ng_delta() == doctest::Approx(0.11).epsilon(1e-15));

    const ChargeConfig oe = c.with_parity(Parity::OE);
    CHECK(oe.ng1 == doctest::Approx(c.ng1 + 0.5));
    CHECK(oe.ng2 == doctest::Approx(c.ng2));
    const ChargeConfig oo = c.with_parity(Parity::OO);
    CHECK(oo.ng_sigma() == doctest::Approx(c.ng_sigma() + 1.0));
    CHECK(oo.ng_delta() == doctest::Approx(c.ng_delta()));
}

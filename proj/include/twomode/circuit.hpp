#ifndef TWOMODE_CIRCUIT_HPP
#define TWOMODE_CIRCUIT_HPP

#include <string>
#include <utility>

namespace twomode {

// e^2/h in GHz*fF, for charging energies from capacitances.
inline constexpr double kESquaredOverH_GHz_fF = 38.7404585;

// Junction and charging energies of the three-island, two-junction circuit.
// All energies are in GHz*h.
struct CircuitParams {
    double ej1 = 0.0;  // Josephson energy, junction 1
    double ej2 = 0.0;  // Josephson energy, junction 2
    double ec = 0.0;   // island charging energy
    double ep = 0.0;   // inter-island coupling energy

    double ec_sigma() const { return ec + ep / 2.0; }
    double ec_delta() const { return ec - ep / 2.0; }
    double ej_mean() const { return 0.5 * (ej1 + ej2); }
    bool symmetric() const { return ej1 == ej2; }

    // Throws InvalidParameterError unless EJ1,EJ2,EC > 0 and 0 <= EP < 2 EC.
    void validate() const;

    static CircuitParams symmetric_params(double ej, double ec, double ep) {
        return CircuitParams{ej, ej, ec, ep};
    }
};

// (EC, EP) in GHz*h from the shunt capacitance C and coupling capacitance
// C_m of the symmetric three-island network, both in fF.
//   C* = C (C + 2 C_m)/(C + C_m)
//   EC = e^2 C* / 2 (C*^2 - C_m^2),  EP = e^2 C_m / (C*^2 - C_m^2)
std::pair<double, double> derive_energies(double c_fF, double cm_fF);

// Quasiparticle parity of the two islands; O on island i shifts n_gi by +0.5.
enum class Parity { EE, EO, OE, OO };

inline const char* parity_name(Parity p) {
    switch (p) {
        case Parity::EE: return "EE";
        case Parity::EO: return "EO";
        case Parity::OE: return "OE";
        case Parity::OO: return "OO";
    }
    return "?";
}

// Offset charges on the two inner islands, in Cooper pairs.
// Sum/difference convention: n_gS = n_g1 + n_g2, n_gD = n_g1 - n_g2.
struct ChargeConfig {
    double ng1 = 0.0;
    double ng2 = 0.0;

    double ng_sigma() const { return ng1 + ng2; }
    double ng_delta() const { return ng1 - ng2; }

    static ChargeConfig from_sum_diff(double ng_sigma, double ng_delta) {
        return ChargeConfig{(ng_sigma + ng_delta) / 2.0, (ng_sigma - ng_delta) / 2.0};
    }

    ChargeConfig with_parity(Parity p) const {
        ChargeConfig out = *this;
        if (p == Parity::OE || p == Parity::OO) out.ng1 += 0.5;
        if (p == Parity::EO || p == Parity::OO) out.ng2 += 0.5;
        return out;
    }

    void validate() const;
};

}  // namespace twomode

#endif

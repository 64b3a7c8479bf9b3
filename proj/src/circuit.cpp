#include "twomode/circuit.hpp"

#include <cmath>
#include <sstream>

#include "twomode/errors.hpp"

namespace twomode {

void CircuitParams::validate() const {
    std::ostringstream err;
    if (!(std::isfinite(ej1) && std::isfinite(ej2) && std::isfinite(ec) && std::isfinite(ep))) {
        throw InvalidParameterError("circuit parameters must be finite");
    }
    if (ej1 <= 0.0 || ej2 <= 0.0) {
        err << "Josephson energies must be positive (EJ1=" << ej1 << ", EJ2=" << ej2 << ")";
        throw InvalidParameterError(err.str());
    }
    if (ec <= 0.0) {
        err << "charging energy must be positive (EC=" << ec << ")";
        throw InvalidParameterError(err.str());
    }
    if (ep < 0.0 || ep >= 2.0 * ec) {
        err << "coupling energy must satisfy 0 <= EP < 2 EC (EP=" << ep << ", EC=" << ec << ")";
        throw InvalidParameterError(err.str());
    }
}

std::pair<double, double> derive_energies(double c_fF, double cm_fF) {
    if (!(c_fF > 0.0) || !std::isfinite(c_fF)) {
        throw InvalidParameterError("shunt capacitance C must be positive");
    }
    if (cm_fF < 0.0 || !std::isfinite(cm_fF)) {
        throw InvalidParameterError("coupling capacitance C_m must be nonnegative");
    }
    const double cstar = c_fF * (c_fF + 2.0 * cm_fF) / (c_fF + cm_fF);
    const double denom = cstar * cstar - cm_fF * cm_fF;
    if (cm_fF >= cstar || denom <= 0.0) {
        std::ostringstream err;
        err << "C_m=" << cm_fF << " fF yields a nonpositive difference-mode charging energy "
            << "(C*=" << cstar << " fF)";
        throw InvalidParameterError(err.str());
    }
    const double ec = kESquaredOverH_GHz_fF * cstar / (2.0 * denom);
    const double ep = kESquaredOverH_GHz_fF * cm_fF / denom;
    return {ec, ep};
}

void ChargeConfig::validate() const {
    if (!(std::isfinite(ng1) && std::isfinite(ng2))) {
        throw InvalidParameterError("offset charges must be finite");
    }
}

}  // namespace twomode

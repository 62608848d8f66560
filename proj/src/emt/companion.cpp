#include "gridstudies/emt/companion.hpp"

#include "gridstudies/common/error.hpp"

namespace gridstudies::emt {

CompanionBranch discretize(ElementKind kind, double value, double dt) {
    if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
    if (!(value > 0.0)) throw InvalidArgument("element value must be positive");
    CompanionBranch b;
    b.kind = kind;
    b.value = value;
    switch (kind) {
        case ElementKind::R: b.conductance = 1.0 / value; break;
        case ElementKind::L: b.conductance = dt / (2.0 * value); break;
        case ElementKind::C: b.conductance = 2.0 * value / dt; break;
    }
    return b;
}

double next_history(const CompanionBranch& branch, double current, double voltage) {
    switch (branch.kind) {
        case ElementKind::R: return 0.0;
        case ElementKind::L: return current + branch.conductance * voltage;
        case ElementKind::C: return -current - branch.conductance * voltage;
    }
    return 0.0;
}

}  // namespace gridstudies::emt

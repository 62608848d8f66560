#pragma once

namespace gridstudies::emt {

enum class ElementKind { R, L, C };

/// Trapezoidal companion of a lumped element: i(t) = G*v(t) + history.
struct CompanionBranch {
    ElementKind kind = ElementKind::R;
    double value = 0.0;
    double conductance = 0.0;
    double history_current = 0.0;
};

/// Build the companion of an element for step `dt`. Throws InvalidArgument for
/// nonpositive values or dt.
CompanionBranch discretize(ElementKind kind, double value, double dt);

/// History term for the next step given this step's branch current and voltage.
double next_history(const CompanionBranch& branch, double current, double voltage);

}  // namespace gridstudies::emt

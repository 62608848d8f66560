#pragma once

#include <vector>

#include "config.hpp"

namespace gridstudies::cli {

StudyDef fault_lab_study();
StudyDef lightning_study();
StudyDef calibrate_study();
StudyDef dist_study();
StudyDef stability_study();
StudyDef ml_study();
StudyDef phasor_study();

inline std::vector<StudyDef> all_studies() {
    return {fault_lab_study(), lightning_study(), calibrate_study(), dist_study(),
            stability_study(), ml_study(),        phasor_study()};
}

}  // namespace gridstudies::cli

#pragma once

#include <vector>

namespace qclab {

// Unit of calibration data: one feature vector tagged with the diffusion
// step label it was observed at (0 <= timestep < T) and the trajectory it
// came from.
struct Sample {
    std::vector<double> features;
    int timestep = 0;
    int traj_id = 0;
};

}  // namespace qclab

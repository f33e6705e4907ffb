#pragma once

#include <filesystem>
#include <string_view>

#include "spreach/kinematics.hpp"

namespace spreach {

// Parses a robot config document (JSON, one robot per document):
//
//   {
//     "name": "demo-2r",
//     "dof": 2,
//     "convention": "classic",            // optional; "classic" is the only value accepted
//     "joints": [
//       {"theta_offset_rad": 0.0, "d_m": 0.0, "a_m": 0.5, "alpha_rad": 0.0,
//        "limit_min_rad": -3.14159, "limit_max_rad": 3.14159,
//        "type": "revolute"},             // optional; "revolute" is the only value accepted
//       ...
//     ],
//     "extrinsics": [16 numbers, row-major, camera -> base]
//   }
//
// Unknown fields are rejected. Throws FormatError on malformed JSON and
// ValidationError (naming the offending field) on schema or invariant
// violations.
RobotModel load_robot_model(std::string_view config_text);

// Reads the file and forwards to load_robot_model. Throws IoError if the
// file cannot be read.
RobotModel load_robot_model_file(const std::filesystem::path& path);

}  // namespace spreach

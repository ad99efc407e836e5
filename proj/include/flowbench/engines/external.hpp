#pragma once

#include <filesystem>
#include <string>

#include "flowbench/core/flow.hpp"
#include "flowbench/core/flow_io.hpp"
#include "flowbench/error.hpp"

namespace flowbench::engines {

/// Loads a precomputed .flo (Ldof / EpicFlow / PWC-net style exports) and
/// checks it against the expected raster dimensions.
inline FlowField import_external_flow(const std::filesystem::path& path, int expected_w,
                                      int expected_h) {
    FlowField flow = read_flo(path); // format errors (magic/truncation/NaN) propagate
    if (flow.width != expected_w || flow.height != expected_h)
        throw ProtocolError("import_external_flow: " + path.string() + " is " +
                            std::to_string(flow.width) + "x" + std::to_string(flow.height) +
                            ", expected " + std::to_string(expected_w) + "x" +
                            std::to_string(expected_h));
    return flow;
}

} // namespace flowbench::engines

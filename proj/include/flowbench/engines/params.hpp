#pragma once

#include <cstdint>
#include <string>

#include "flowbench/error.hpp"

namespace flowbench::engines {

struct FarnebackParams {
    int pyramid_levels = 3;
    float pyramid_scale = 0.5f;
    int window_size = 15;           // odd
    int iterations_per_level = 3;
    int poly_n = 5;                 // odd neighborhood size
    float poly_sigma = 1.1f;

    void validate() const {
        if (pyramid_levels < 1 || iterations_per_level < 1)
            throw InvalidInput("FarnebackParams: levels and iterations must be >= 1");
        if (!(pyramid_scale > 0.0f && pyramid_scale < 1.0f))
            throw InvalidInput("FarnebackParams: pyramid_scale must lie in (0,1)");
        if (window_size < 3 || window_size % 2 == 0)
            throw InvalidInput("FarnebackParams: window_size must be odd and >= 3");
        if (poly_n < 3 || poly_n % 2 == 0)
            throw InvalidInput("FarnebackParams: poly_n must be odd and >= 3");
        if (!(poly_sigma > 0.0f)) throw InvalidInput("FarnebackParams: poly_sigma must be positive");
    }
};

struct TvL1Params {
    double lambda = 0.15;       // data-attachment weight
    double theta = 0.3;         // coupling parameter
    double tau = 0.25;          // dual time step
    int warps_per_level = 5;
    int inner_iterations = 30;
    int pyramid_levels = 3;
    float pyramid_scale = 0.5f;
    double stop_epsilon = 1e-3; // convergence threshold on the flow update

    void validate() const {
        if (!(lambda > 0 && theta > 0 && tau > 0 && stop_epsilon > 0))
            throw InvalidInput("TvL1Params: lambda, theta, tau, stop_epsilon must be positive");
        if (tau > 0.25) throw InvalidInput("TvL1Params: tau must be <= 0.25 for dual-ascent stability");
        if (warps_per_level < 1 || inner_iterations < 1 || pyramid_levels < 1)
            throw InvalidInput("TvL1Params: iteration counts must be >= 1");
        if (!(pyramid_scale > 0.0f && pyramid_scale < 1.0f))
            throw InvalidInput("TvL1Params: pyramid_scale must lie in (0,1)");
    }
};

struct PatchMatchParams {
    int patch_radius = 4;
    int propagation_iterations = 3;
    double random_search_radius = 0; // 0 -> image min side
    double search_decay = 0.5;
    double fb_consistency_threshold = 1.0;
    int hierarchy_levels = 2;
    uint64_t rng_seed = 0x9e3779b9;

    void validate() const {
        if (patch_radius < 1) throw InvalidInput("PatchMatchParams: patch_radius must be >= 1");
        if (propagation_iterations < 1)
            throw InvalidInput("PatchMatchParams: propagation_iterations must be >= 1");
        if (!(fb_consistency_threshold > 0))
            throw InvalidInput("PatchMatchParams: fb_consistency_threshold must be positive");
        if (!(search_decay > 0 && search_decay < 1))
            throw InvalidInput("PatchMatchParams: search_decay must lie in (0,1)");
        if (hierarchy_levels < 1) throw InvalidInput("PatchMatchParams: hierarchy_levels must be >= 1");
        if (random_search_radius < 0)
            throw InvalidInput("PatchMatchParams: random_search_radius must be >= 0");
    }
};

/// Names a flow source: one of the three native engines or an external
/// directory of precomputed .flo files.
struct EngineId {
    enum class Kind { farneback, tvl1, patchmatch, external };

    Kind kind = Kind::farneback;
    std::string external_name;

    static EngineId farneback() { return {Kind::farneback, {}}; }
    static EngineId tvl1() { return {Kind::tvl1, {}}; }
    static EngineId patchmatch() { return {Kind::patchmatch, {}}; }
    static EngineId external(std::string name) {
        if (name.empty()) throw InvalidInput("EngineId: external engine name must be non-empty");
        return {Kind::external, std::move(name)};
    }

    bool is_native() const { return kind != Kind::external; }

    std::string name() const {
        switch (kind) {
            case Kind::farneback: return "farneback";
            case Kind::tvl1: return "tvl1";
            case Kind::patchmatch: return "patchmatch";
            case Kind::external: return external_name;
        }
        return {};
    }

    /// "farneback" | "tvl1" | "patchmatch" | "external:<name>"
    static EngineId parse(const std::string& text) {
        if (text == "farneback") return farneback();
        if (text == "tvl1") return tvl1();
        if (text == "patchmatch") return patchmatch();
        if (text.rfind("external:", 0) == 0) return external(text.substr(9));
        throw InvalidInput("EngineId: unknown engine '" + text + "'");
    }

    bool operator==(const EngineId& o) const {
        return kind == o.kind && external_name == o.external_name;
    }
};

} // namespace flowbench::engines

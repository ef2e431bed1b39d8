#pragma once

// Clustered lumpy background: Poisson clusters of anisotropic stretched-
// exponential lumps at random orientations, quantized to 8 bits through a
// fixed affine map calibrated once on a pilot ensemble.

#include <filesystem>
#include <vector>

#include "somgen/gray_image.hpp"
#include "somgen/rng.hpp"

namespace somgen {

struct ClbNormalization {
    // quantized = clamp(round(scale * value + offset), 0, 255)
    // Defaults are the frozen pilot calibration for the default parameters
    // (1000 realizations, 0.1st/99.9th percentiles mapped to 0/255); see
    // calibrate_clb_normalization for recomputing them after parameter edits.
    double scale = 25.828015800668492;
    double offset = 0.0;
};

struct ClbParams {
    // Poisson mean number of clusters per 256x256 of area; the generator
    // realizes a homogeneous cluster process at this density over the frame
    // plus a 3*cluster_spread margin, so edge statistics stay stationary.
    double mean_clusters = 37.5;
    double mean_lumps_per_cluster = 20.0;
    double cluster_spread = 12.0; // std of lump offsets from the cluster center
    double lump_length = 5.0;     // characteristic length along the lump axis
    double lump_width = 2.0;      // and across it
    double alpha_exp = 2.1;       // radial falloff: exp(-alpha * r^beta / l(theta))
    double beta_exp = 0.5;
    double amplitude = 1.0;
    // Lump evaluation window in units of the characteristic radius
    // (l_max/alpha)^(1/beta); the profile is ~exp(-sqrt(6)) ~ 0.086 A there.
    double bbox_factor = 6.0;

    ClbNormalization normalization; // calibrated; identity until then

    void validate() const;

    static ClbParams load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

/// Raw float superposition field (before quantization).
FloatImage render_clb_field(const ClbParams& params, RngStream& rng,
                            int width = kRealizationSize, int height = kRealizationSize);

/// render_clb_field quantized through params.normalization.
GrayImage generate_clb(const ClbParams& params, RngStream& rng);

/// Affine map placing the pilot ensemble's 0.1st/99.9th pixel percentiles at
/// 0/255. Per-image normalization is deliberately not offered: it would
/// distort ensemble statistics.
ClbNormalization calibrate_clb_normalization(const ClbParams& params, std::uint64_t master_seed,
                                             int n_realizations);

struct RadialAutocorrelation {
    std::vector<double> correlation; // index = integer lag, correlation[0] = 1
    bool degenerate = false;         // some realization had zero variance
};

/// Ensemble-averaged, rotationally averaged, mean-removed autocorrelation.
/// Throws below 100 realizations.
RadialAutocorrelation radial_autocorrelation(const std::vector<GrayImage>& ensemble,
                                             int max_lag);

} // namespace somgen

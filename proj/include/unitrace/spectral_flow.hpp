#pragma once

#include <vector>

#include "unitrace/family.hpp"
#include "unitrace/linalg.hpp"

namespace unitrace {

/// Eigenphases theta_j(k) followed continuously along a k-grid.
struct PhaseTrack {
    std::vector<double> grid;                  // increasing k samples
    std::vector<std::vector<double>> phases;   // phases[i][j]: unwrapped phase of track j at grid[i]
    std::vector<std::vector<CVector>> vectors; // vectors[i][j]: eigenvector of track j at grid[i]
    std::vector<double> overlaps;              // overlaps[i]: worst matched |<v|w>| between grid[i], grid[i+1]

    std::size_t tracks() const { return phases.empty() ? 0 : phases.front().size(); }
};

struct ScanOptions {
    /// Steps whose matching falls below this overlap are bisected.
    double min_overlap = 0.7;
    /// How many times one nominal step may be halved before TrackingError.
    /// Zero makes the nominal grid strict.
    int max_refinements = 12;
};

/// A parameter k0 at which U(k0) has the simple eigenvalue 1.
struct Crossing {
    double k0 = 0.0;
    int track_index = -1;
    CVector eigvec;       // unit vector spanning ker(U(k0) - I)
    Complex speed;        // <v|U'(k0)|v> = d lambda / dk at k0
    double residual = 0;  // ||(U(k0) - I) v||
};

/// Nominal scan step: 40 samples per turn of the fastest eigenphase.
double default_step(const UnitaryFamily& f);

/// Samples eig_unitary on [k_min, k_max] (the step is shrunk so the grid ends
/// exactly at k_max) and matches eigenvectors between neighbouring samples.
/// Throws TrackingError when a step cannot be matched.
PhaseTrack scan_eigenphases(const UnitaryFamily& f, double k_min, double k_max, double step,
                            const ScanOptions& options = {});

/// Every k0 in [k_min, k_max] where some tracked eigenphase passes a multiple
/// of 2 pi, refined and validated, sorted by k0.
/// Throws DegenerateCrossingError when two tracks reach 1 within 1e-9 in k.
std::vector<Crossing> find_crossings(const UnitaryFamily& f, double k_min, double k_max, double step,
                                     const ScanOptions& options = {});

/// Checks the simple-zero and non-zero-speed hypotheses at k0.
/// Throws RankDeficiencyError or ZeroSpeedError.
Crossing validate_simple_zero(const UnitaryFamily& f, double k0);

}  // namespace unitrace

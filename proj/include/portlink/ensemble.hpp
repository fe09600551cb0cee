// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#pragma once

#include "portlink/multiport.hpp"
#include "portlink/propagation.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace portlink::propagation
{
    struct UserChannel
    {
        Vec3 position;
        ChannelMatrix h;
    };

    struct ChannelEnsemble
    {
        std::vector<UserChannel> users;
        double carrier_hz = 0.0;
        std::uint64_t seed = 0;
        std::string scene_hash;

        std::size_t n_rx() const { return users.front().h.n_rx(); }
        std::size_t n_tx() const { return users.front().h.n_tx(); }
    };

    // Uniform-in-area user drop on an annulus around the base station, at a
    // fixed height and within an azimuth sector.
    struct RingSampler
    {
        std::size_t count = 140;
        double r_min = 90.0;  // m, horizontal distance
        double r_max = 200.0; // m
        double height = 1.5;  // m
        double sector_min_deg = -180.0;
        double sector_max_deg = 180.0;
        std::uint64_t seed = 1;
    };

    // Independent random stream for item `index` of a run seeded with `seed`, so
    // parallel and serial evaluation draw identical numbers.
    std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

    std::vector<Vec3> sample_ring(const RingSampler &sampler, const Vec3 &center);

    struct EnsembleOptions
    {
        int max_bounces = 2;
        std::optional<double> frequency_hz; // defaults to the scene carrier
        // Antenna networks at the analysis frequency. When present, the
        // propagation block is embedded with the lossless-antenna radiation
        // factors sqrt(I - S^H S) of each side before cascading.
        std::optional<ScatteringMatrix> s_t;
        std::optional<ScatteringMatrix> s_r;
        std::optional<multiport::TerminationSet> terminations;
        unsigned threads = 1;
    };

    // Traces, assembles and cascades one channel per placement.
    ChannelEnsemble generate_ensemble(const Scene &scene, const ArrayPlacement &bs, const ArrayPlacement &ue_template,
                                      const std::vector<Vec3> &placements, const EnsembleOptions &options,
                                      std::uint64_t seed = 0);

    ChannelEnsemble generate_ensemble(const Scene &scene, const ArrayPlacement &bs, const ArrayPlacement &ue_template,
                                      const RingSampler &sampler, const EnsembleOptions &options);

    // H = C^{1/2} H_iid with i.i.d. CN(0, 1) entries. Throws PropagationError
    // when `rx_correlation` is not Hermitian positive semidefinite.
    ChannelEnsemble generate_stochastic_ensemble(std::size_t n_users, std::size_t n_rx, std::size_t n_tx,
                                                 const CMatrix &rx_correlation, std::uint64_t seed,
                                                 double carrier_hz = 3.16e9);

    // sqrt(I - S^H S) for a passive network; identity for a matched one.
    CMatrix radiation_factor(const ScatteringMatrix &s);

    // Hermitian PSD square root, throws PropagationError if not PSD.
    CMatrix psd_sqrt(const CMatrix &m);

    // Text dump: one JSON header line, then one line per user holding the
    // position and the row-major real/imaginary pairs of H.
    void write_ensemble(std::ostream &out, const ChannelEnsemble &ensemble);
    ChannelEnsemble read_ensemble(std::istream &in);
}

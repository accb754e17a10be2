#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "mosacd/dataset.hpp"
#include "mosacd/graph.hpp"

namespace mosacd {

struct CiResult {
    bool independent = false;
    double p_value = 0.0;
    double statistic = 0.0;
    int dof = 0;
};

/// Rates of the stylized noisy oracle: alpha flips dependence to independence, beta the reverse.
struct NoiseParams {
    double alpha = 0.0;
    double beta = 0.0;
    std::uint64_t rng_seed = 0;
};

/// Upper tail of chi-square(dof) at `statistic`, via the regularized incomplete gamma Q.
double chi_square_sf(double statistic, double dof);

/// Stratified likelihood-ratio test of x _||_ y | s on categorical columns. Each non-empty
/// stratum contributes (r-1)(c-1) degrees of freedom over the levels of x and y it actually
/// contains. Throws DegenerateTestError on an empty dataset or when no dof remain.
CiResult g2_test(const Dataset& data, NodeId x, NodeId y, std::span<const NodeId> s, double threshold);

/// d-separation verdict with p saturated at 1 (independent) or 0.
CiResult oracle_test(const Dag& g, NodeId x, NodeId y, std::span<const NodeId> s);

/// Oracle verdict flipped with probability alpha/beta. The coin is a hash of the seed and the
/// canonical query ({x,y} unordered, s sorted), so repeated queries agree.
CiResult noisy_oracle_test(const Dag& g, NodeId x, NodeId y, std::span<const NodeId> s, const NoiseParams& noise);

/// What the skeleton search talks to.
class CiTest {
public:
    virtual ~CiTest() = default;
    virtual int node_count() const = 0;
    virtual CiResult test(NodeId x, NodeId y, std::span<const NodeId> s, double threshold) const = 0;
    virtual std::string describe() const = 0;
};

/// G^2 over a dataset; a degenerate test counts as independent with p = 1.
class G2Test final : public CiTest {
public:
    explicit G2Test(const Dataset& data) : data_(&data) {}
    int node_count() const override { return data_->columns(); }
    CiResult test(NodeId x, NodeId y, std::span<const NodeId> s, double threshold) const override;
    std::string describe() const override { return "g2"; }

private:
    const Dataset* data_;
};

class OracleTest final : public CiTest {
public:
    explicit OracleTest(const Dag& g) : g_(&g) {}
    int node_count() const override { return g_->node_count(); }
    CiResult test(NodeId x, NodeId y, std::span<const NodeId> s, double threshold) const override;
    std::string describe() const override { return "oracle"; }

private:
    const Dag* g_;
};

class NoisyOracleTest final : public CiTest {
public:
    NoisyOracleTest(const Dag& g, NoiseParams noise) : g_(&g), noise_(noise) {}
    int node_count() const override { return g_->node_count(); }
    CiResult test(NodeId x, NodeId y, std::span<const NodeId> s, double threshold) const override;
    std::string describe() const override;

private:
    const Dag* g_;
    NoiseParams noise_;
};

}  // namespace mosacd

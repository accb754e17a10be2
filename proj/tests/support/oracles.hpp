#pragma once

// Deliberately naive reference implementations. They share no code with the library and
// trade speed for being obviously correct.

#include <cstdint>
#include <ostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mosacd/dataset.hpp"
#include "mosacd/graph.hpp"

namespace oracle {

/// d-separation via the moralized ancestral graph.
bool d_separated_moral(const mosacd::Dag& g, int x, int y, const std::vector<int>& s);

/// CPDAG by enumerating every orientation of the skeleton and keeping the acyclic ones with
/// the same v-structures. Only for small graphs (edge count <= 18).
mosacd::Pdag cpdag_by_enumeration(const mosacd::Dag& g);

/// Upper tail of chi-square with integer dof, from the textbook closed forms.
double chi_square_sf(double x, int dof);

struct G2 {
    double statistic = 0;
    int dof = 0;
};

/// G^2 with per-stratum dof summed over strata, computed from string-keyed count tables.
G2 g2(const mosacd::Dataset& data, int x, int y, const std::vector<int>& s);

/// int_0^1 (1-au)^m (1-bu)^n du by composite Simpson in long double.
double i_factor_simpson(int m, int n, double a, double b, int intervals = 20000);

/// Pascal's triangle.
double binomial_pascal(int n, int k);

/// Every non-empty subset of {0..n-1} of size k, lexicographic.
std::vector<std::vector<int>> subsets(const std::vector<int>& items, int k);

/// Edge set helpers.
std::set<std::pair<int, int>> directed(const mosacd::Pdag& p);
std::set<std::pair<int, int>> undirected(const mosacd::Pdag& p);

}  // namespace oracle

namespace mosacd {
// gtest printers
void PrintTo(const Pdag& p, std::ostream* os);
void PrintTo(const Dag& g, std::ostream* os);
}  // namespace mosacd

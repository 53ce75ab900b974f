#pragma once

// Hand-built models the suites pin exact values against. Expected matrices
// come from symbolic path enumeration on these graphs (see the suites).

#include <string>

#include "causamix/model.hpp"

namespace causamix::testing {

inline void add_z(WeightedDag& dag, int id) {
  dag.add_node(id, "Z" + std::to_string(id), NodeKind::UnobservedUnderlying);
}

inline void add_y(WeightedDag& dag, int id) {
  dag.add_node(id, "Y" + std::to_string(id), NodeKind::ObservedUnderlying);
}

inline void add_x(WeightedDag& dag, int id) {
  dag.add_node(id, "X" + std::to_string(id), NodeKind::ObservedUr);
}

inline void add_h(WeightedDag& dag, int id) {
  dag.add_node(id, "H" + std::to_string(id), NodeKind::LatentRoot);
}

// Four measured variables; Z4 is the only u-leaf. The two routes Z1→Z4 that
// carry d (direct, weight −d, and through Z3) cancel exactly, so the noise
// map over columns N_Z1,N_Z2,N_Z3 is
//   [[1,0,0],[a,1,0],[ab+d,b,1],[a(b+c),b+c,1]]
// and the effect of {Z1,Z2} on Z4 is (b+c) times their effect on Z2: the
// model sits on the measure-zero set the dependence checks must flag.
// The merged noise of Z4 is deliberately left out of u_leaf_noise_ids; the
// overall map then carries measurement columns for Z1..Z3 only.
inline SemMeModel cancelling_diamond(double a = 0.7, double b = 0.9,
                                     double c = 0.8, double d = 0.6) {
  SemMeModel me;
  for (int i = 1; i <= 4; ++i) add_z(me.dag, i);
  me.dag.set_edge(1, 2, a);
  me.dag.set_edge(2, 3, b);
  me.dag.set_edge(1, 3, d);
  me.dag.set_edge(1, 4, -d);
  me.dag.set_edge(2, 4, c);
  me.dag.set_edge(3, 4, 1.0);
  attach_measurements(me);
  me.canonical = true;
  return me;
}

// The other member of cancelling_diamond's equivalence class: Z3 and Z4 trade
// places as the group's hidden leaf. Five edges against the diamond's six;
// same noise map with the third column owned by N_Z4 instead of N_Z3.
inline SemMeModel cancelling_diamond_swapped(double a = 0.7, double b = 0.9,
                                             double c = 0.8, double d = 0.6) {
  SemMeModel me;
  for (int i = 1; i <= 4; ++i) add_z(me.dag, i);
  me.dag.set_edge(1, 2, a);
  me.dag.set_edge(2, 4, b + c);
  me.dag.set_edge(1, 3, d);
  me.dag.set_edge(4, 3, 1.0);
  me.dag.set_edge(2, 3, -c);
  attach_measurements(me);
  me.canonical = true;
  me.u_leaf_noise_ids = {3};
  return me;
}

// Six measured variables: Z1 feeds Z2 and Z3, and three u-leaves hang off
// them: Z4 ← {Z1,Z2}, Z5 ← {Z1,Z3}, Z6 ← {Z2,Z3}. At a=b=c=d=1 the noise
// map is [[1,0,0],[1,1,0],[1,0,1],[2,1,0],[2,0,1],[2,1,1]]; choosing
// ab+cd = 0 (say d=−1) zeroes Z6's first entry and makes its row a
// combination of the Z4 and Z5 rows.
inline SemMeModel triple_leaf_fan(double a = 1.0, double b = 1.0,
                                  double c = 1.0, double d = 1.0) {
  SemMeModel me;
  for (int i = 1; i <= 6; ++i) add_z(me.dag, i);
  me.dag.set_edge(1, 2, 1.0);
  me.dag.set_edge(1, 3, 1.0);
  me.dag.set_edge(1, 4, a);
  me.dag.set_edge(2, 4, 1.0);
  me.dag.set_edge(1, 5, c);
  me.dag.set_edge(3, 5, 1.0);
  me.dag.set_edge(2, 6, b);
  me.dag.set_edge(3, 6, d);
  attach_measurements(me);
  me.canonical = true;
  me.u_leaf_noise_ids = {4, 5, 6};
  return me;
}

// Three observed variables in a chain with one latent feeding the last two:
// X1→X2 (a), X2→X3 (b), H→X2 (d), H→X3 (c). Noise map over columns
// N_H,N_X1,N_X2,N_X3: [[0,1,0,0],[d,a,1,0],[bd+c,ab,b,1]].
inline SemUrModel latent_chain_ur(double a = 2.0, double b = 3.0,
                                  double c = 5.0, double d = 7.0) {
  SemUrModel ur;
  for (int i = 1; i <= 3; ++i) add_x(ur.dag, i);
  add_h(ur.dag, 4);
  ur.dag.set_edge(1, 2, a);
  ur.dag.set_edge(2, 3, b);
  ur.dag.set_edge(4, 2, d);
  ur.dag.set_edge(4, 3, c);
  return ur;
}

// The measured-variable twin of latent_chain_ur: every edge reversed, the
// latent turned into the u-leaf Z4, the root X1 into the observed Y1.
// Its noise map is the transpose of the chain's up to column order.
inline SemMeModel latent_chain_me(double a = 2.0, double b = 3.0,
                                  double c = 5.0, double d = 7.0) {
  SemMeModel me;
  add_y(me.dag, 1);
  add_z(me.dag, 2);
  add_z(me.dag, 3);
  add_z(me.dag, 4);
  me.dag.set_edge(2, 1, a);
  me.dag.set_edge(3, 2, b);
  me.dag.set_edge(2, 4, d);
  me.dag.set_edge(3, 4, c);
  attach_measurements(me);
  me.canonical = true;
  me.u_leaf_noise_ids = {4};
  return me;
}

// Two observed variables sharing one latent: H→X1 (1), H→X2 (b), X1→X2 (a).
// Swapping which noise acts as X1's own yields the companion below; the pair
// is the model's whole equivalence class.
inline SemUrModel shared_latent_pair(double a = 0.8, double b = 0.6) {
  SemUrModel ur;
  add_x(ur.dag, 1);
  add_x(ur.dag, 2);
  add_h(ur.dag, 3);
  ur.dag.set_edge(3, 1, 1.0);
  ur.dag.set_edge(3, 2, b);
  ur.dag.set_edge(1, 2, a);
  return ur;
}

inline SemUrModel shared_latent_pair_swapped(double a = 0.8, double b = 0.6) {
  SemUrModel ur;
  add_x(ur.dag, 1);
  add_x(ur.dag, 2);
  add_h(ur.dag, 3);
  ur.dag.set_edge(3, 1, 1.0);
  ur.dag.set_edge(3, 2, -b);
  ur.dag.set_edge(1, 2, a + b);
  return ur;
}

// Measured three-variable vee: Z2→Z1 (a), Z1→Z3 (1), Z2→Z3 (b); Z3 is the
// u-leaf and {Z1,Z3} form the only non-singleton group.
inline SemMeModel measured_vee(double a = 0.5, double b = 0.8) {
  SemMeModel me;
  for (int i = 1; i <= 3; ++i) add_z(me.dag, i);
  me.dag.set_edge(2, 1, a);
  me.dag.set_edge(1, 3, 1.0);
  me.dag.set_edge(2, 3, b);
  attach_measurements(me);
  me.canonical = true;
  me.u_leaf_noise_ids = {3};
  return me;
}

// The center-swapped companion of measured_vee: Z2→Z3 (a+b), Z3→Z1 (1),
// Z2→Z1 (−b); Z1 becomes the u-leaf.
inline SemMeModel measured_vee_swapped(double a = 0.5, double b = 0.8) {
  SemMeModel me;
  for (int i = 1; i <= 3; ++i) add_z(me.dag, i);
  me.dag.set_edge(2, 3, a + b);
  me.dag.set_edge(3, 1, 1.0);
  me.dag.set_edge(2, 1, -b);
  attach_measurements(me);
  me.canonical = true;
  me.u_leaf_noise_ids = {1};
  return me;
}

// Four observed variables, three latents, no observed-observed edges;
// loadings rows X1..X4 over H1..H3 are [[0,1,−1],[2,2,0],[3,3,0],[4,0,4]].
// Every small dependence check passes, yet the noise block from all three
// latents to all four observed variables has rank 2 against three
// vertex-disjoint paths.
inline SemUrModel overlapping_latents_ur() {
  SemUrModel ur;
  for (int i = 1; i <= 4; ++i) add_x(ur.dag, i);
  for (int j = 5; j <= 7; ++j) add_h(ur.dag, j);
  ur.dag.set_edge(6, 1, 1.0);
  ur.dag.set_edge(7, 1, -1.0);
  ur.dag.set_edge(5, 2, 2.0);
  ur.dag.set_edge(6, 2, 2.0);
  ur.dag.set_edge(5, 3, 3.0);
  ur.dag.set_edge(6, 3, 3.0);
  ur.dag.set_edge(5, 4, 4.0);
  ur.dag.set_edge(7, 4, 4.0);
  return ur;
}

// Z1→Z3←Z2 with unobserved Z3: a u-leaf neither parent can host.
inline SemMeModel collider_me(double w1 = 0.7, double w2 = 0.9) {
  SemMeModel me;
  for (int i = 1; i <= 3; ++i) add_z(me.dag, i);
  me.dag.set_edge(1, 3, w1);
  me.dag.set_edge(2, 3, w2);
  attach_measurements(me);
  me.canonical = true;
  me.u_leaf_noise_ids = {3};
  return me;
}

// Z1→Z2 (1), Z2→Z3 (1), Z1→Z3 (−1): the two routes from Z1 to Z3 sum to a
// zero total effect.
inline SemMeModel cancelling_triangle() {
  SemMeModel me;
  for (int i = 1; i <= 3; ++i) add_z(me.dag, i);
  me.dag.set_edge(1, 2, 1.0);
  me.dag.set_edge(2, 3, 1.0);
  me.dag.set_edge(1, 3, -1.0);
  attach_measurements(me);
  me.canonical = true;
  me.u_leaf_noise_ids = {3};
  return me;
}

}  // namespace causamix::testing

#include "srfine/constants.hpp"

#include <algorithm>

namespace srfine::constants {

std::map<std::string, double> stability_chain() {
  using std::max;
  const double pi = std::numbers::pi;
  std::map<std::string, double> c;
  const double u0 = ca * cgsum + cb * cgsumd;
  const double u1 = 2 * pi * u0;
  const double u2 = 4 * pi * pi * u0;
  const double u3 = max({2 * pi, 4 * pi * pi, c_u});
  const double u5 = 8 * pi * pi;
  const double u6 = 2 * u3 / (c_l2 * c_l2);
  const double u7 = max(u6, u1 / (c_l1 * c_l1));
  const double u8 = max(u7, 1 / c_l);
  const double u9 = max({1 / c_l, u7, u8 * u2});
  const double u10 = 3 * u9;
  const double u11 = max(6 * u3 * u10, u8 * u0 * u5);
  const double u12 = max(u7, u2 * u8);
  const double u13 = 2 * u12;
  const double u14 = max(2 * u13 * u3, 2 * pi * u8 * u1);
  const double u15 = u8 * u2 * c_u;
  const double u16 = 4 * max({u11, u14, u15});
  const double u17 = 6 * u3;
  const double u18 = u10 * u17;
  const double u19 = 2 * u3;
  const double u20 = u13 * u19;
  const double u21 = u8 * u2 * c_u;
  const double u22 = 4 * max({u18, u20, u21});
  const double u23 = 2 * u16;
  const double l3 = c_l2 * (delta - 1.0 / 6.0) * (delta - 1.0 / 6.0);
  const double u24 = u23 / l3;
  const double u25 = 2 * u22;
  const double u26 = u25 / l3;
  const double u27 = 2 * max(u24, u26);
  const double u28 = u10 * c_u / c_l2;
  const double u29 = u28 + 1 / c_l;
  const double u30 = 2 * max({u7, 1 / (c_l1 * c_l1), 1 / (c_l2 * c_l2)});
  const double u31 = max(u30, 1 / c_l);
  const double u35 = max({1 / c_l, u30, u31 * u2});
  const double u36 = 3 * u35;
  const double u37 = max(6 * u3 * u36, u31 * u0 * u5);
  const double u38 = max(u30, u2 * u31);
  const double u39 = 2 * u38;
  const double u40 = max(2 * u39 * u3, 2 * pi * u31 * u1);
  const double u41 = u31 * u2 * c_u;
  const double u42 = 4 * max({u37, u40, u41});
  const double u43 = 2 * u42;
  const double u44 = u43 / l3;
  const double u45 = u36 * u17;
  const double u46 = u39 * u19;
  const double u47 = u31 * u2 * c_u;
  const double u48 = 4 * max({u45, u46, u47});
  const double u49 = 2 * u48;
  const double u50 = u49 / l3;
  const double u34 = 2 * max(u44, u50);
  const double u51 = u36 * c_u / c_l2;
  const double u52 = u51 + 1 / c_l;
  const double u55 = 2 * u0 * u8;
  const double u56 = 2 * u0 * u31;
  const double u57 = max(u55, u29);
  const double u58 = max(u56, u52);
  const double u53 = 12 * max(u27, u57);
  const double u54 = 6 * max(u34, u58);
  const double cc = 4 * max({1 / c_l, cabshidd / c_l2, u53, cabshid * u54});

  c = {{"c_u0", u0},   {"c_u1", u1},   {"c_u2", u2},   {"c_u3", u3},   {"c_u5", u5},   {"c_u6", u6},
       {"c_u7", u7},   {"c_u8", u8},   {"c_u9", u9},   {"c_u10", u10}, {"c_u11", u11}, {"c_u12", u12},
       {"c_u13", u13}, {"c_u14", u14}, {"c_u15", u15}, {"c_u16", u16}, {"c_u17", u17}, {"c_u18", u18},
       {"c_u19", u19}, {"c_u20", u20}, {"c_u21", u21}, {"c_u22", u22}, {"c_u23", u23}, {"c_l3", l3},
       {"c_u24", u24}, {"c_u25", u25}, {"c_u26", u26}, {"c_u27", u27}, {"c_u28", u28}, {"c_u29", u29},
       {"c_u30", u30}, {"c_u31", u31}, {"c_u34", u34}, {"c_u35", u35}, {"c_u36", u36}, {"c_u37", u37},
       {"c_u38", u38}, {"c_u39", u39}, {"c_u40", u40}, {"c_u41", u41}, {"c_u42", u42}, {"c_u43", u43},
       {"c_u44", u44}, {"c_u45", u45}, {"c_u46", u46}, {"c_u47", u47}, {"c_u48", u48}, {"c_u49", u49},
       {"c_u50", u50}, {"c_u51", u51}, {"c_u52", u52}, {"c_u53", u53}, {"c_u54", u54}, {"c_u55", u55},
       {"c_u56", u56}, {"c_u57", u57}, {"c_u58", u58}, {"c", cc}};
  return c;
}

double stability_constant() { return stability_chain().at("c"); }

}  // namespace srfine::constants

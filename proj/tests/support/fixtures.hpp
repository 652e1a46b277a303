#pragma once

#include <vector>

#include "fbst/tables.hpp"

namespace fixtures {

inline std::vector<fbst::ContingencyTable> m1_tables() {
  return {fbst::ContingencyTable::from_rows({{241, 187, 44}, {139, 130, 30}, {364, 302, 70}}, 1, "1"),
          fbst::ContingencyTable::from_rows({{42, 41, 323}, {39, 41, 341}, {15, 21, 171}}, 2, "2"),
          fbst::ContingencyTable::from_rows({{282, 35, 151}, {131, 37, 79}, {1055, 143, 546}}, 3, "3")};
}

inline std::vector<fbst::ContingencyTable> m2_tables() {
  return {fbst::ContingencyTable::from_rows({{228, 179, 39}, {25, 33, 211}, {482, 75, 208}}, 1, "1"),
          fbst::ContingencyTable::from_rows({{77, 85, 248}, {165, 135, 120}, {188, 21, 24}}, 2, "2"),
          fbst::ContingencyTable::from_rows({{40, 87, 354}, {119, 104, 27}, {305, 1049, 372}}, 3, "3")};
}

inline fbst::CptModel m1_model() {
  fbst::CptModel m;
  m.px = {0.3, 0.2, 0.5};
  m.py_given_x = {{0.3, 0.2, 0.5}, {0.4, 0.4, 0.2}, {0.2, 0.1, 0.7}};
  m.z_mode = fbst::CptModel::ZMode::given_x;
  m.pz = {{0.5, 0.4, 0.1}, {0.1, 0.1, 0.8}, {0.6, 0.1, 0.3}};
  return m;
}

inline fbst::CptModel m2_model() {
  fbst::CptModel m = m1_model();
  m.z_mode = fbst::CptModel::ZMode::given_xy;
  m.pz = {{0.5, 0.4, 0.1}, {0.1, 0.1, 0.8}, {0.6, 0.1, 0.3},
          {0.2, 0.2, 0.6}, {0.4, 0.3, 0.3}, {0.8, 0.1, 0.1},
          {0.1, 0.2, 0.7}, {0.5, 0.4, 0.1}, {0.2, 0.6, 0.2}};
  return m;
}

}  // namespace fixtures

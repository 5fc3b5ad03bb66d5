// Copyright 2026 The gatecut Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string>
#include <vector>

namespace gatecut::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct Chart {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
  bool log_y = false;
  int width = 640;
  int height = 400;
};

// Self-contained SVG line chart. `comment` goes into an XML comment at the
// top of the file.
std::string render_svg(const Chart& c, const std::string& comment = "");

}  // namespace gatecut::cli

// Copyright 2026 The Tundra Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tundra/image/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "tundra/common/hash.hpp"
#include "tundra/image/codec.hpp"

namespace tundra {

namespace {

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  uint64_t bits() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

enum class Subject { None, Goat, Leopard };

struct Spot {
  double dx, dy, r;
};

struct Scene {
  double base;
  double gx, gy;
  // Low-frequency terrain: a few soft bumps.
  struct Bump {
    double x, y, r, a;
  };
  std::vector<Bump> bumps;
  double grain;
  uint64_t grainSeed;
};

Scene makeScene(Rng& rng, int w, int h) {
  Scene s;
  s.base = rng.uniform(80, 170);
  s.gx = rng.uniform(-0.5, 0.5);
  s.gy = rng.uniform(-0.5, 0.5);
  const int n = rng.integer(2, 5);
  for (int i = 0; i < n; ++i) {
    s.bumps.push_back({rng.uniform(0, w), rng.uniform(0, h), rng.uniform(6, 20), rng.uniform(-25, 25)});
  }
  s.grain = rng.uniform(2, 8);
  s.grainSeed = rng.bits();
  return s;
}

double sceneAt(const Scene& s, const std::vector<double>& grain, int w, double x, double y) {
  double v = s.base + s.gx * (x - w / 2.0) + s.gy * (y - w / 2.0);
  for (const auto& b : s.bumps) {
    const double d2 = ((x - b.x) * (x - b.x) + (y - b.y) * (y - b.y)) / (b.r * b.r);
    v += b.a * std::exp(-d2);
  }
  return v + grain[static_cast<size_t>(y) * w + static_cast<size_t>(x)];
}

struct BurstPlan {
  Subject subject = Subject::None;
  double cx = 0, cy = 0, rx = 0, ry = 0;
  double vx = 0, vy = 0;
  double contrast = 0;
  std::vector<Spot> spots;
  double light = 0;
  // Coat level between spots; chosen so the coat averages to zero.
  double ground = 0;
};

bool inSpot(const BurstPlan& p, double ux, double uy) {
  for (const auto& s : p.spots) {
    const double d2 = (ux - s.dx) * (ux - s.dx) + (uy - s.dy) * (uy - s.dy);
    if (d2 < s.r * s.r) return true;
  }
  return false;
}

BurstPlan planBurst(Rng& rng, Subject subject, int w, int h) {
  BurstPlan p;
  p.subject = subject;
  p.rx = rng.uniform(13, 20);
  p.ry = rng.uniform(9, 14);
  p.cx = rng.uniform(p.rx + 2, w - p.rx - 2);
  p.cy = rng.uniform(p.ry + 2, h - p.ry - 2);
  p.vx = rng.uniform(-2, 2);
  p.vy = rng.uniform(-1, 1);
  p.light = rng.uniform(-15, 15);
  if (subject == Subject::Leopard) {
    p.contrast = rng.uniform(60, 100);
    // Mirrored spot pairs keep the coat symmetric about the body's axis.
    const int pairs = rng.integer(8, 14);
    for (int i = 0; i < pairs; ++i) {
      const double dx = rng.uniform(0.1, 0.85);
      const double dy = rng.uniform(-0.8, 0.8);
      const double r = rng.uniform(0.10, 0.18);
      p.spots.push_back({dx, dy, r});
      p.spots.push_back({-dx, dy, r});
    }
    int inside = 0, spotted = 0;
    for (int i = 0; i < 64; ++i) {
      for (int j = 0; j < 64; ++j) {
        const double ux = (i + 0.5) / 32.0 - 1.0;
        const double uy = (j + 0.5) / 32.0 - 1.0;
        if (ux * ux + uy * uy >= 1.0) continue;
        ++inside;
        if (inSpot(p, ux, uy)) ++spotted;
      }
    }
    const double frac = static_cast<double>(spotted) / inside;
    p.ground = frac < 1.0 ? frac / (1.0 - frac) : 0.0;
  } else if (subject == Subject::Goat) {
    p.contrast = rng.uniform(25, 50);
  }
  return p;
}

ImageRecord renderFrame(const Scene& scene, const std::vector<double>& grain, const BurstPlan& plan,
                        int frame, Rng& rng, int w, int h) {
  // Per-frame visibility: the subject may be partly out of view or blurred.
  const double visibility = plan.subject == Subject::None ? 0.0 : rng.uniform(0.5, 1.0);
  const double cx = plan.cx + plan.vx * frame + rng.uniform(-1.5, 1.5);
  const double cy = plan.cy + plan.vy * frame + rng.uniform(-1.0, 1.0);
  const double noise = rng.uniform(2, 9);
  const double light = plan.light + rng.uniform(-4, 4);
  ImageRecord img(w, h, ImageMode::Gray8);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v = sceneAt(scene, grain, w, x, y) + light;
      const double ux = (x + 0.5 - cx) / plan.rx;
      const double uy = (y + 0.5 - cy) / plan.ry;
      const double r2 = ux * ux + uy * uy;
      if (plan.subject != Subject::None && r2 < 1.0) {
        const double edge = std::min(1.0, (1.0 - r2) * 4.0);
        if (plan.subject == Subject::Goat) {
          v += plan.contrast * visibility * edge;
        } else {
          // Zero-mean coat: dark rosettes on a slightly lighter ground.
          const double coat = inSpot(plan, ux, uy) ? -1.0 : plan.ground;
          v += plan.contrast * visibility * edge * coat;
        }
      }
      v += noise * rng.normal();
      img.at(x, y) = static_cast<uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  }
  return img;
}

std::string cameraId(int c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "cam%03d", c);
  return buf;
}

}  // namespace

std::vector<SyntheticFrame> synthesizeCorpus(const CorpusOptions& opts) {
  if (opts.cameras < 1 || opts.burstsPerCamera < 1 || opts.burstLength < 1 || opts.width < 8 ||
      opts.height < 8 || !(opts.leopardFraction >= 0.0 && opts.leopardFraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid corpus options");
  }
  const int bursts = opts.cameras * opts.burstsPerCamera;
  const int leopards = static_cast<int>(std::lround(opts.leopardFraction * bursts));
  std::vector<Subject> subjects(static_cast<size_t>(bursts));
  {
    Rng rng(deriveSeed(opts.seed, "corpus/subjects"));
    for (int i = 0; i < bursts; ++i) {
      subjects[i] = i < leopards ? Subject::Leopard
                                 : (rng.uniform() < 0.5 ? Subject::Goat : Subject::None);
    }
    std::shuffle(subjects.begin(), subjects.end(), std::mt19937_64(rng.bits()));
  }

  std::vector<SyntheticFrame> out;
  out.reserve(static_cast<size_t>(bursts) * opts.burstLength);
  for (int c = 0; c < opts.cameras; ++c) {
    const std::string cam = cameraId(c);
    Rng rng(deriveSeed(opts.seed, "corpus/" + cam));
    const Scene scene = makeScene(rng, opts.width, opts.height);
    std::vector<double> grain(static_cast<size_t>(opts.width) * opts.height);
    {
      Rng g(scene.grainSeed);
      for (double& v : grain) v = scene.grain * g.normal();
    }
    int64_t t = opts.startTime + rng.integer(0, 86400);
    for (int b = 0; b < opts.burstsPerCamera; ++b) {
      const Subject subject = subjects[static_cast<size_t>(c) * opts.burstsPerCamera + b];
      const BurstPlan plan = planBurst(rng, subject, opts.width, opts.height);
      const int64_t label = subject == Subject::Leopard ? 1 : 0;
      for (int f = 0; f < opts.burstLength; ++f) {
        SyntheticFrame fr;
        fr.image = renderFrame(scene, grain, plan, f, rng, opts.width, opts.height);
        char name[48];
        std::snprintf(name, sizeof name, "%lld_%lld.pgm", static_cast<long long>(t),
                      static_cast<long long>(label));
        fr.entry.path = std::filesystem::path(cam) / name;
        fr.image.path = fr.entry.path.string();
        fr.entry.cameraId = cam;
        fr.entry.timestamp = t;
        fr.entry.label = label;
        out.push_back(std::move(fr));
        t += rng.integer(1, 5);
      }
      t += rng.integer(600, 7200);
    }
  }
  return out;
}

std::vector<CorpusEntry> generateCorpus(const CorpusOptions& opts, const std::filesystem::path& root) {
  auto frames = synthesizeCorpus(opts);
  std::vector<CorpusEntry> entries;
  entries.reserve(frames.size());
  for (auto& fr : frames) {
    fr.entry.path = root / fr.entry.path;
    std::filesystem::create_directories(fr.entry.path.parent_path());
    writeImageFile(fr.image, fr.entry.path);
    entries.push_back(std::move(fr.entry));
  }
  return entries;
}

Dataset corpusDataset(std::shared_ptr<Engine> engine, const std::vector<SyntheticFrame>& frames,
                      int numPartitions) {
  std::vector<const SyntheticFrame*> order;
  for (const auto& f : frames) order.push_back(&f);
  std::sort(order.begin(), order.end(), [](const SyntheticFrame* a, const SyntheticFrame* b) {
    return a->entry.path < b->entry.path;
  });
  std::vector<Row> rows;
  rows.reserve(order.size());
  for (const SyntheticFrame* f : order) {
    const CorpusEntry& e = f->entry;
    Row r;
    r.values.emplace_back(e.path.string());
    r.values.emplace_back(f->image);
    r.values.emplace_back(e.cameraId);
    r.values.push_back(e.timestamp ? Cell(Timestamp{*e.timestamp}) : Cell(Null{}));
    r.values.push_back(e.label ? Cell(*e.label) : Cell(Null{}));
    rows.push_back(std::move(r));
  }
  return Dataset::fromRows(std::move(engine), std::move(rows), imageCorpusSchema(), numPartitions);
}

}  // namespace tundra

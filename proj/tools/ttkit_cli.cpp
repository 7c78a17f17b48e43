#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ttkit_c.h"

namespace {

// Exit codes: 0 success, 1 domain error, 2 usage error.
constexpr int kDomainError = 1;

struct StringOut {
  char* s = nullptr;
  ~StringOut() { ttk_string_free(s); }
};

int report_error(int code) {
  std::cerr << "error: " << ttk_last_error_message() << "\n";
  (void)code;
  return kDomainError;
}

struct TrackHandle {
  ttk_track* t = nullptr;
  ~TrackHandle() { ttk_track_free(t); }
};

struct MeasureHandle {
  ttk_measure* m = nullptr;
  ~MeasureHandle() { ttk_measure_free(m); }
};

struct WordHandle {
  ttk_word* w = nullptr;
  ~WordHandle() { ttk_word_free(w); }
};

struct ConeHandle {
  ttk_cone* c = nullptr;
  ~ConeHandle() { ttk_cone_free(c); }
};

int load_track_arg(const std::string& path, TrackHandle& out) {
  return ttk_track_load(path.c_str(), &out.t);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ttkit: train tracks, splitting sequences and flat cones"};
  app.require_subcommand(1);

  std::string track_path, other_path, measure_path, word_path, cone_path;
  std::string phi_a, phi_b;
  int radius = 6;
  int twists = 4;
  bool json_out = false, dot_out = false;
  bool with_shifts = false, directed = false;

  CLI::App* v_validate = app.add_subcommand("validate", "validation report");
  v_validate->add_option("track", track_path)->required();

  CLI::App* v_regions =
      app.add_subcommand("regions", "complementary regions and signature");
  v_regions->add_option("track", track_path)->required();

  CLI::App* v_recurrent =
      app.add_subcommand("recurrent", "recurrence with a positive witness");
  v_recurrent->add_option("track", track_path)->required();

  CLI::App* v_apply =
      app.add_subcommand("apply", "replay a move word on a track");
  v_apply->add_option("track", track_path)->required();
  v_apply->add_option("word", word_path)->required();

  CLI::App* v_cone = app.add_subcommand("cone", "enumerate a flat-cone ball");
  v_cone->add_option("track", track_path)->required();
  v_cone->add_option("--measure", measure_path)->required();
  v_cone->add_option("--radius", radius);
  v_cone->add_flag("--json", json_out);
  v_cone->add_flag("--dot", dot_out);

  CLI::App* v_dist =
      app.add_subcommand("dist", "L1 distance between cone vertices");
  v_dist->add_option("cone", cone_path)->required();
  v_dist->add_option("phi1", phi_a)->required();
  v_dist->add_option("phi2", phi_b)->required();

  CLI::App* v_cert =
      app.add_subcommand("orbit-cert", "orbit invariant certificate");
  v_cert->add_option("track", track_path)->required();

  CLI::App* v_same =
      app.add_subcommand("same-orbit", "compare orbit certificates");
  v_same->add_option("a", track_path)->required();
  v_same->add_option("b", other_path)->required();

  CLI::App* v_agree =
      app.add_subcommand("agree", "agreement procedure on a carried position");
  v_agree->add_option("position", track_path)->required();
  v_agree->add_option("--measure", measure_path)->required();

  CLI::App* v_ball = app.add_subcommand("tt-ball", "ambient track-graph ball");
  v_ball->add_option("track", track_path)->required();
  v_ball->add_option("--radius", radius);
  v_ball->add_flag("--with-shifts", with_shifts);
  v_ball->add_flag("--directed", directed);

  CLI::App* v_distort =
      app.add_subcommand("distortion", "cone vs ambient distance probe");
  v_distort->add_option("track", track_path)->required();
  v_distort->add_option("--measure", measure_path)->required();
  v_distort->add_option("--radius", radius);

  CLI::App* v_twist =
      app.add_subcommand("twist-growth", "multi-twist word norm table");
  v_twist->add_option("track", track_path)->required();
  v_twist->add_option("--n", twists);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (v_validate->parsed()) {
    TrackHandle t;
    if (int rc = load_track_arg(track_path, t)) return report_error(rc);
    StringOut rep;
    int ok = 0;
    if (int rc = ttk_track_validate(t.t, &rep.s, &ok)) return report_error(rc);
    std::cout << rep.s;
    return ok ? 0 : kDomainError;
  }

  if (v_regions->parsed()) {
    TrackHandle t;
    if (int rc = load_track_arg(track_path, t)) return report_error(rc);
    StringOut rep;
    if (int rc = ttk_track_regions(t.t, &rep.s)) return report_error(rc);
    std::cout << rep.s;
    return 0;
  }

  if (v_recurrent->parsed()) {
    TrackHandle t;
    if (int rc = load_track_arg(track_path, t)) return report_error(rc);
    int rec = 0;
    StringOut witness;
    if (int rc = ttk_track_recurrent(t.t, &rec, &witness.s))
      return report_error(rc);
    if (!rec) {
      std::cout << "not recurrent\n";
      return kDomainError;
    }
    std::cout << "recurrent\n" << witness.s;
    return 0;
  }

  if (v_apply->parsed()) {
    TrackHandle t;
    if (int rc = load_track_arg(track_path, t)) return report_error(rc);
    WordHandle w;
    if (int rc = ttk_word_load(word_path.c_str(), &w.w))
      return report_error(rc);
    TrackHandle out;
    if (int rc = ttk_apply_word(t.t, w.w, &out.t)) return report_error(rc);
    StringOut text;
    if (int rc = ttk_track_serialize(out.t, &text.s)) return report_error(rc);
    std::cout << text.s;
    return 0;
  }

  if (v_cone->parsed()) {
    TrackHandle t;
    if (int rc = load_track_arg(track_path, t)) return report_error(rc);
    MeasureHandle m;
    if (int rc = ttk_measure_load(measure_path.c_str(), &m.m))
      return report_error(rc);
    ConeHandle c;
    if (int rc = ttk_cone_ball(t.t, m.m, radius, &c.c))
      return report_error(rc);
    StringOut text;
    int rc = dot_out ? ttk_cone_to_dot(c.c, &text.s)
                     : ttk_cone_to_json(c.c, &text.s);
    if (rc) return report_error(rc);
    std::cout << text.s;
    return 0;
  }

  if (v_dist->parsed()) {
    std::ifstream in(cone_path);
    if (!in) {
      std::cerr << "error: cannot open " << cone_path << "\n";
      return kDomainError;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    int d = 0;
    if (int rc = ttk_cone_json_distance(buf.str().c_str(), phi_a.c_str(),
                                        phi_b.c_str(), &d))
      return report_error(rc);
    std::cout << d << "\n";
    return 0;
  }

  if (v_cert->parsed()) {
    TrackHandle t;
    if (int rc = load_track_arg(track_path, t)) return report_error(rc);
    StringOut hex;
    if (int rc = ttk_orbit_certificate(t.t, &hex.s)) return report_error(rc);
    std::cout << hex.s << "\n";
    return 0;
  }

  if (v_same->parsed()) {
    TrackHandle a, b;
    if (int rc = load_track_arg(track_path, a)) return report_error(rc);
    if (int rc = load_track_arg(other_path, b)) return report_error(rc);
    int same = 0;
    if (int rc = ttk_same_orbit(a.t, b.t, &same)) return report_error(rc);
    std::cout << (same ? "same orbit\n" : "different orbits\n");
    return same ? 0 : kDomainError;
  }

  if (v_agree->parsed()) {
    MeasureHandle m;
    if (int rc = ttk_measure_load(measure_path.c_str(), &m.m))
      return report_error(rc);
    StringOut rep;
    if (int rc = ttk_agree_file(track_path.c_str(), m.m, &rep.s))
      return report_error(rc);
    std::cout << rep.s;
    return 0;
  }

  if (v_ball->parsed()) {
    TrackHandle t;
    if (int rc = load_track_arg(track_path, t)) return report_error(rc);
    StringOut rep;
    if (int rc = ttk_tt_ball(t.t, radius, with_shifts, directed, &rep.s))
      return report_error(rc);
    std::cout << rep.s;
    return 0;
  }

  if (v_distort->parsed()) {
    TrackHandle t;
    if (int rc = load_track_arg(track_path, t)) return report_error(rc);
    MeasureHandle m;
    if (int rc = ttk_measure_load(measure_path.c_str(), &m.m))
      return report_error(rc);
    StringOut rep;
    if (int rc = ttk_distortion(t.t, m.m, radius, &rep.s))
      return report_error(rc);
    std::cout << rep.s;
    return 0;
  }

  if (v_twist->parsed()) {
    TrackHandle t;
    if (int rc = load_track_arg(track_path, t)) return report_error(rc);
    StringOut rep;
    if (int rc = ttk_twist_growth(t.t, twists, &rep.s))
      return report_error(rc);
    std::cout << rep.s;
    return 0;
  }

  std::cerr << "error: no verb selected\n";
  return 2;
}

/*
 * Copyright (c) 2026, The kgshard Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "kgshard/errors.hpp"
#include "kgshard/kg_model.hpp"
#include "kgshard/term.hpp"

namespace kgshard {

struct SyntheticSpec {
  std::uint32_t universities = 1;
  std::uint64_t seed = 0;
};

namespace lubm {

inline constexpr std::string_view kUb = "http://swat.cse.lehigh.edu/onto/univ-bench.owl#";

inline Term ub(std::string_view local) { return Term::iri(std::string(kUb) + std::string(local)); }

inline std::string university_iri(std::uint32_t u) {
  return "http://www.University" + std::to_string(u) + ".edu";
}

inline std::string department_iri(std::uint32_t u, std::uint32_t d) {
  return "http://www.Department" + std::to_string(d) + ".University" + std::to_string(u) + ".edu";
}

}  // namespace lubm

/// Seeded university graph over the LUBM vocabulary. Superclass types
/// (Student, Person, Professor, Faculty, Course) are materialized, research
/// groups are sub-organizations of both their department and university,
/// and every degree edge has its inverse hasAlumnus edge, so the 14 LUBM
/// queries match without inference.
inline KnowledgeGraph generate_lubm(const SyntheticSpec& spec) {
  if (spec.universities == 0) throw InputError("universities must be >= 1");
  using lubm::ub;
  std::mt19937_64 rng(spec.seed);
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); };

  KnowledgeGraph g;
  const Term type = Term::iri(std::string(vocab::kRdfType));
  auto iri = [](const std::string& s) { return Term::iri(s); };
  auto lit = [](const std::string& s) { return Term::literal(s); };
  auto is = [&](const std::string& x, std::initializer_list<const char*> classes) {
    for (const char* c : classes) g.add(iri(x), type, ub(c));
  };
  // Degrees come from any of the generated universities or a few others.
  const std::uint32_t degree_pool = spec.universities + 4;
  auto degree = [&](const std::string& person, const char* prop, std::uint32_t u) {
    g.add(iri(person), ub(prop), iri(lubm::university_iri(u)));
    g.add(iri(lubm::university_iri(u)), ub("hasAlumnus"), iri(person));
  };
  auto contact = [&](const std::string& x, const std::string& local, const std::string& host) {
    g.add(iri(x), ub("name"), lit(local));
    g.add(iri(x), ub("emailAddress"), lit(local + "@" + host));
    g.add(iri(x), ub("telephone"),
          lit(std::to_string(pick(100, 999)) + "-" + std::to_string(pick(100, 999)) + "-" +
              std::to_string(pick(1000, 9999))));
  };

  for (std::uint32_t u = 0; u < spec.universities; ++u) {
    const std::string univ = lubm::university_iri(u);
    is(univ, {"University", "Organization"});
    g.add(iri(univ), ub("name"), lit("University" + std::to_string(u)));
    const auto departments = static_cast<std::uint32_t>(pick(5, 8));
    for (std::uint32_t d = 0; d < departments; ++d) {
      const std::string dept = lubm::department_iri(u, d);
      const std::string host = "Department" + std::to_string(d) + ".University" +
                               std::to_string(u) + ".edu";
      is(dept, {"Department", "Organization"});
      g.add(iri(dept), ub("name"), lit("Department" + std::to_string(d)));
      g.add(iri(dept), ub("subOrganizationOf"), iri(univ));

      std::vector<std::string> courses, grad_courses, professors;
      auto new_course = [&](bool grad) {
        auto& list = grad ? grad_courses : courses;
        std::string local = (grad ? "GraduateCourse" : "Course") + std::to_string(list.size());
        std::string c = dept + "/" + local;
        if (grad) is(c, {"GraduateCourse", "Course"});
        else is(c, {"Course"});
        g.add(iri(c), ub("name"), lit(local));
        list.push_back(c);
        return c;
      };
      std::vector<std::vector<std::string>> teaches_grad;

      struct Rank {
        const char* cls;
        std::uint64_t lo, hi;
        bool professor;
      };
      const Rank ranks[] = {{"FullProfessor", 3, 4, true},
                            {"AssociateProfessor", 3, 4, true},
                            {"AssistantProfessor", 3, 4, true},
                            {"Lecturer", 2, 3, false}};
      for (const Rank& r : ranks) {
        const auto n = pick(r.lo, r.hi);
        for (std::uint64_t i = 0; i < n; ++i) {
          const std::string local = r.cls + std::to_string(i);
          const std::string x = dept + "/" + local;
          if (r.professor) is(x, {r.cls, "Professor", "Faculty", "Person"});
          else is(x, {r.cls, "Faculty", "Person"});
          contact(x, local, host);
          g.add(iri(x), ub("worksFor"), iri(dept));
          degree(x, "undergraduateDegreeFrom", static_cast<std::uint32_t>(pick(0, degree_pool - 1)));
          degree(x, "mastersDegreeFrom", static_cast<std::uint32_t>(pick(0, degree_pool - 1)));
          degree(x, "doctoralDegreeFrom", static_cast<std::uint32_t>(pick(0, degree_pool - 1)));
          const auto nc = pick(1, 2);
          for (std::uint64_t c = 0; c < nc; ++c) g.add(iri(x), ub("teacherOf"), iri(new_course(false)));
          std::vector<std::string> mine;
          if (r.professor) {
            const auto ng = pick(1, 2);
            for (std::uint64_t c = 0; c < ng; ++c) {
              mine.push_back(new_course(true));
              g.add(iri(x), ub("teacherOf"), iri(mine.back()));
            }
            professors.push_back(x);
            teaches_grad.push_back(mine);
          }
          if (std::string_view(r.cls) == "FullProfessor" && i == 0) {
            is(x, {"Chair"});
            g.add(iri(x), ub("headOf"), iri(dept));
          }
          const auto np = pick(2, 4);
          for (std::uint64_t p = 0; p < np; ++p) {
            const std::string pub = x + "/Publication" + std::to_string(p);
            is(pub, {"Publication"});
            g.add(iri(pub), ub("name"), lit("Publication" + std::to_string(p)));
            g.add(iri(pub), ub("publicationAuthor"), iri(x));
          }
        }
      }

      const auto groups = pick(2, 3);
      for (std::uint64_t i = 0; i < groups; ++i) {
        const std::string rg = dept + "/ResearchGroup" + std::to_string(i);
        is(rg, {"ResearchGroup", "Organization"});
        g.add(iri(rg), ub("subOrganizationOf"), iri(dept));
        g.add(iri(rg), ub("subOrganizationOf"), iri(univ));
      }

      std::vector<bool> course_taken(courses.size(), false), grad_taken(grad_courses.size(), false);
      const auto undergrads = pick(50, 70);
      std::vector<std::string> ug;
      for (std::uint64_t i = 0; i < undergrads; ++i) {
        const std::string local = "UndergraduateStudent" + std::to_string(i);
        const std::string x = dept + "/" + local;
        ug.push_back(x);
        is(x, {"UndergraduateStudent", "Student", "Person"});
        contact(x, local, host);
        g.add(iri(x), ub("memberOf"), iri(dept));
        const auto nc = pick(2, 4);
        for (std::uint64_t c = 0; c < nc; ++c) {
          auto ci = pick(0, courses.size() - 1);
          course_taken[ci] = true;
          g.add(iri(x), ub("takesCourse"), iri(courses[ci]));
        }
        if (pick(0, 4) == 0)
          g.add(iri(x), ub("advisor"), iri(professors[pick(0, professors.size() - 1)]));
      }
      for (std::size_t ci = 0; ci < courses.size(); ++ci)
        if (!course_taken[ci]) g.add(iri(ug[ci % ug.size()]), ub("takesCourse"), iri(courses[ci]));

      const auto grads = pick(15, 20);
      std::vector<std::string> gs;
      for (std::uint64_t i = 0; i < grads; ++i) {
        const std::string local = "GraduateStudent" + std::to_string(i);
        const std::string x = dept + "/" + local;
        gs.push_back(x);
        is(x, {"GraduateStudent", "Student", "Person"});
        contact(x, local, host);
        g.add(iri(x), ub("memberOf"), iri(dept));
        degree(x, "undergraduateDegreeFrom",
               i == 0 ? u : static_cast<std::uint32_t>(pick(0, degree_pool - 1)));
        const auto a = pick(0, professors.size() - 1);
        g.add(iri(x), ub("advisor"), iri(professors[a]));
        const auto& theirs = teaches_grad[a];
        auto own_course = pick(0, theirs.size() - 1);
        g.add(iri(x), ub("takesCourse"), iri(theirs[own_course]));
        for (std::size_t gi = 0; gi < grad_courses.size(); ++gi)
          if (grad_courses[gi] == theirs[own_course]) grad_taken[gi] = true;
        if (i == 0) {
          g.add(iri(x), ub("takesCourse"), iri(grad_courses[0]));
          grad_taken[0] = true;
        }
        const auto extra = pick(0, 2);
        for (std::uint64_t c = 0; c < extra; ++c) {
          auto gi = pick(0, grad_courses.size() - 1);
          grad_taken[gi] = true;
          g.add(iri(x), ub("takesCourse"), iri(grad_courses[gi]));
        }
        if (pick(0, 3) == 0)
          g.add(iri(x), ub("teachingAssistantOf"), iri(courses[pick(0, courses.size() - 1)]));
        if (pick(0, 2) == 0) {
          const std::string& prof = professors[a];
          g.add(iri(prof + "/Publication0"), ub("publicationAuthor"), iri(x));
        }
      }
      for (std::size_t gi = 0; gi < grad_courses.size(); ++gi)
        if (!grad_taken[gi]) g.add(iri(gs[gi % gs.size()]), ub("takesCourse"), iri(grad_courses[gi]));
    }
  }
  return g;
}

}  // namespace kgshard

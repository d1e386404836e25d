use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use super::document::{object, SpaceDocument};
use super::fixtures::{fixture, FIXTURE_NAMES};
use super::maps::{named_map, parse_family, parse_subset, MapFile};
use super::report::{betti_value, digest, homology_value, int_value, Report};
use crate::coarsify::{
    anti_cech, asdim_upper_bound, coarsening_space, coarsify_homology, cover_from_net,
    hybrid_entourage, nerve, uniform_decomposition_check, AntiCechPrefix, Cover, DEFAULT_BUDGET,
};
use crate::homology::{
    homology_at_scale, homology_colimit, mv_check, smith_normal_form, swindle_identity_check,
    EngineConfig, HomologyError, Matrix, DEFAULT_BASIS_CAP,
};
use crate::morphisms::{
    are_close, certify_flasque, certify_flasque_generalized, check_equivalence, check_morphism,
    FlasqueCaps, SpaceMap,
};
use crate::space::{parse_rational, BigFamilyPrefix, BornCoarseSpace, PointSet, Rational};

pub const DEFAULT_MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "coarsekit",
    version,
    about = "Coarse homology, coarsification and certificates on finite and windowed spaces",
    after_help = "Spaces: a space document path, or one of point, hexagon, cycle:N, \
                  half_line:N, int_window:N, grid2_window:N.\n\
                  Maps: a map file path, or identity, shift, translate:a[,b], const:ID \
                  (self-maps of --space).\n\
                  Subsets: ids separated by commas or spaces; m..n expands integer ids; * is everything.\n\
                  Families: nested subsets separated by |."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on basis size per degree.
    #[arg(long, global = true, default_value_t = DEFAULT_BASIS_CAP)]
    basis_cap: usize,
}

#[derive(Debug, Args)]
struct SpaceArg {
    #[arg(long)]
    space: String,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// Nested members separated by `|`.
    #[arg(long, conflicts_with = "seed_set")]
    family: Option<String>,
    /// Seed of the generated family `Y_i = closure_at(i)[seed]`, `i = 0..=depth`.
    #[arg(long)]
    seed_set: Option<String>,
    #[arg(long, default_value_t = 1)]
    depth: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coarse components, or components of one closure scale.
    Components {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        scale: Option<usize>,
    },
    /// Coarse ordinary homology at a scale or in the colimit.
    Homology {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, conflicts_with = "colimit")]
        scale: Option<usize>,
        #[arg(long)]
        colimit: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
        max_dim: usize,
    },
    /// Coarsification homology: measure complexes at the listed scales and at stabilization.
    Qhomology {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, value_delimiter = ',')]
        scale: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
        max_dim: usize,
    },
    /// Ball cover around a greedy net and its nerve.
    Nerve {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        scale: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
        max_dim: usize,
    },
    /// Anti-Čech prefix of ball covers at increasing scales.
    AntiCech {
        #[command(flatten)]
        space: SpaceArg,
        /// Scale indices; `stable` names the stabilization index.
        #[arg(long, value_delimiter = ',', required = true)]
        scales: Vec<String>,
    },
    /// Homology of the telescope of nerves of an anti-Čech prefix.
    Telescope {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, value_delimiter = ',', required = true)]
        scales: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
        max_dim: usize,
    },
    /// Heuristic upper bound on nerve dimensions of Lebesgue ball covers.
    Asdim {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, value_delimiter = ',', required = true)]
        scales: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Controlled and proper check of one map.
    CheckMorphism {
        #[arg(long = "map", required = true)]
        maps: Vec<String>,
        #[arg(long)]
        space: Option<String>,
    },
    /// Closeness of two maps.
    Close {
        #[arg(long = "map", required = true)]
        maps: Vec<String>,
        #[arg(long)]
        space: Option<String>,
    },
    /// Coarse equivalence check for a pair of maps.
    Equivalence {
        #[arg(long = "map", required = true)]
        maps: Vec<String>,
        #[arg(long)]
        space: Option<String>,
    },
    /// Flasqueness certificate for one map, or the generalized form for a sequence.
    Flasque {
        #[arg(long = "map", required = true)]
        maps: Vec<String>,
        #[arg(long)]
        space: Option<String>,
        #[arg(long, default_value_t = 4)]
        scale_cap: usize,
        #[arg(long, default_value_t = 64)]
        iter_cap: usize,
        /// Bounded sets to test; repeatable.
        #[arg(long = "subset")]
        subsets: Vec<String>,
        /// Also check the truncated swindle identity on each tested set.
        #[arg(long)]
        swindle: bool,
        #[arg(long, default_value_t = 1)]
        scale: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
        max_dim: usize,
    },
    /// Excision comparison for a complementary pair.
    MvCheck {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        subset: String,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 1)]
        scale: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
        max_dim: usize,
    },
    /// Hybrid entourage for a family and a decreasing scale list.
    Hybrid {
        #[command(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        phi: Vec<usize>,
        #[arg(long)]
        scale: usize,
    },
    /// Uniform decomposition check of two subsets over decreasing radii.
    Udecomp {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long = "subset", required = true)]
        subsets: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<String>,
    },
    /// Smith normal form of an integer matrix.
    Snf {
        /// Rows as JSON (`[[1,2],[3,4]]`) or `1 2; 3 4`, inline or in a file.
        #[arg(long)]
        matrix: String,
    },
}

/// Result of a CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutcome {
    /// Text for standard output; empty when the report went to `--out`.
    pub stdout: String,
    /// Text for standard error.
    pub stderr: String,
    pub code: i32,
}

enum Failure {
    Usage(String),
    Refusal(Value),
}

fn refusal(reason: impl Into<String>) -> Failure {
    Failure::Refusal(json!({ "reason": reason.into() }))
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(message.into())
}

struct Outcome {
    results: Value,
    refusal: Option<Value>,
}

impl Outcome {
    fn ok(results: Value) -> Self {
        Outcome {
            results,
            refusal: None,
        }
    }

    fn refused(results: Value, refusal: Value) -> Self {
        Outcome {
            results,
            refusal: Some(refusal),
        }
    }
}

struct Ctx {
    inputs: Vec<String>,
    warnings: Vec<String>,
    config: EngineConfig,
}

impl Ctx {
    fn warn(&mut self, w: impl Into<String>) {
        let w = w.into();
        if !self.warnings.contains(&w) {
            self.warnings.push(w);
        }
    }

    fn document(&self, reference: &str, base: Option<&Path>) -> Result<SpaceDocument, Failure> {
        let candidates: Vec<PathBuf> = match base {
            Some(b) if Path::new(reference).is_relative() => vec![b.join(reference), reference.into()],
            _ => vec![reference.into()],
        };
        if let Some(path) = candidates.iter().find(|p| p.is_file()) {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            return SpaceDocument::parse(&text)
                .map_err(|e| usage(format!("{}: {e}", path.display())));
        }
        fixture(reference).ok_or_else(|| {
            usage(format!(
                "`{reference}` is neither a readable file nor a fixture ({})",
                FIXTURE_NAMES.join(", ")
            ))
        })
    }

    fn space_from(&mut self, reference: &str, base: Option<&Path>) -> Result<Arc<BornCoarseSpace>, Failure> {
        let doc = self.document(reference, base)?;
        let space = doc.build().map_err(|e| {
            Failure::Refusal(json!({ "reason": "space construction failed", "error": e.to_string() }))
        })?;
        self.inputs.push(format!("space:{}", doc.emit()));
        if let Some(w) = space.window() {
            self.warn(format!("window-relative result on {}", w.describe()));
        }
        Ok(Arc::new(space))
    }

    fn space(&mut self, reference: &str) -> Result<Arc<BornCoarseSpace>, Failure> {
        self.space_from(reference, None)
    }

    fn map(&mut self, spec: &str, space: Option<&Arc<BornCoarseSpace>>) -> Result<SpaceMap, Failure> {
        let path = Path::new(spec);
        let f = if path.is_file() {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            let file = MapFile::parse(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let base = path.parent();
            let src = self.space_from(&file.source, base)?;
            let tgt = if file.target == file.source {
                src.clone()
            } else {
                self.space_from(&file.target, base)?
            };
            file.build(src, tgt).map_err(|e| {
                Failure::Refusal(json!({ "reason": "map construction failed", "error": e.to_string() }))
            })?
        } else {
            let space = space.ok_or_else(|| {
                usage(format!("`{spec}` is not a map file; named maps need --space"))
            })?;
            named_map(space, spec)
                .ok_or_else(|| usage(format!("`{spec}` is neither a map file nor a named map")))?
                .map_err(|e| {
                    Failure::Refusal(json!({ "reason": "map construction failed", "error": e.to_string() }))
                })?
        };
        self.inputs.push(format!("map:{}", MapFile::emit(&f, "source", "target")));
        if !f.clamped().is_empty() {
            self.warn(format!(
                "clamped at the window edge: {} points",
                f.clamped().len()
            ));
        }
        Ok(f)
    }

    fn maps(
        &mut self,
        specs: &[String],
        space: &Option<String>,
        count: Option<usize>,
    ) -> Result<Vec<SpaceMap>, Failure> {
        if let Some(c) = count {
            if specs.len() != c {
                return Err(usage(format!("expected {c} --map flags, got {}", specs.len())));
            }
        }
        let space = match space {
            Some(s) => Some(self.space(s)?),
            None => None,
        };
        specs.iter().map(|s| self.map(s, space.as_ref())).collect()
    }
}

fn names(space: &BornCoarseSpace, set: &PointSet) -> Value {
    Value::from(space.ground().names(set))
}

fn subset(space: &BornCoarseSpace, spec: &str) -> Result<PointSet, Failure> {
    parse_subset(space, spec).map_err(|e| usage(format!("subset `{spec}`: {e}")))
}

fn family(
    ctx: &mut Ctx,
    space: &BornCoarseSpace,
    args: &FamilyArgs,
    max_scale: usize,
) -> Result<BigFamilyPrefix, Failure> {
    match (&args.family, &args.seed_set) {
        (Some(spec), None) => {
            let members = parse_family(space, spec).map_err(|e| usage(format!("family: {e}")))?;
            BigFamilyPrefix::new(space, members, max_scale)
                .map_err(|e| refusal(e.to_string()))
        }
        (None, Some(seed)) => {
            let seed = subset(space, seed)?;
            ctx.warn(format!(
                "family prefix generated by thickening the seed set through depth {}",
                args.depth
            ));
            Ok(BigFamilyPrefix::generated(space, &seed, args.depth))
        }
        _ => Err(usage("give exactly one of --family or --seed-set")),
    }
}

fn homology_failure(e: &HomologyError) -> Failure {
    Failure::Refusal(json!({ "reason": "homology computation refused", "error": e.to_string() }))
}

fn components_at(space: &BornCoarseSpace, k: usize) -> Vec<Vec<usize>> {
    let n = space.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b) in space.closure_at(k).pairs() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for x in 0..n {
        let r = find(&mut parent, x);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(x);
    }
    groups
}

fn resolve_scales(space: &BornCoarseSpace, raw: &[String]) -> Result<Vec<usize>, Failure> {
    raw.iter()
        .map(|s| match s.as_str() {
            "stable" | "s" => Ok(space.stabilized_at()),
            t => t
                .parse()
                .map_err(|_| usage(format!("scale `{t}` is not an index or `stable`"))),
        })
        .collect()
}

fn cover_value(space: &BornCoarseSpace, c: &Cover) -> Value {
    json!({
        "members": c.members.iter().map(|m| names(space, m)).collect::<Vec<_>>(),
        "bound_scale": c.bound_scale,
        "lebesgue_scale": c.lebesgue_scale,
        "lebesgue_method": c.lebesgue_method.map(|m| format!("{m:?}")),
    })
}

fn prefix_value(space: &BornCoarseSpace, p: &AntiCechPrefix) -> Value {
    json!({
        "scales": p.scales,
        "covers": p.covers.iter().map(|c| cover_value(space, c)).collect::<Vec<_>>(),
        "certificates": p.certificates,
        "refinements": p.refinements,
    })
}

fn parse_matrix(text: &str) -> Result<Matrix<i64>, Failure> {
    let rows: Vec<Vec<i64>> = if text.trim_start().starts_with('[') {
        serde_json::from_str(text).map_err(|e| usage(format!("matrix: {e}")))?
    } else {
        text.split([';', '\n'])
            .map(str::trim)
            .filter(|r| !r.is_empty())
            .map(|r| {
                r.split([',', ' ', '\t'])
                    .filter(|t| !t.is_empty())
                    .map(|t| t.parse().map_err(|_| usage(format!("matrix entry `{t}`"))))
                    .collect()
            })
            .collect::<Result<_, _>>()?
    };
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows[0].len()) || rows[0].is_empty() {
        return Err(usage("matrix must be a nonempty rectangle"));
    }
    Ok(Matrix::from_rows(rows))
}

fn big_rows(m: &crate::homology::BigMatrix) -> Value {
    Value::from(
        m.to_rows()
            .iter()
            .map(|r| Value::from(r.iter().map(int_value).collect::<Vec<_>>()))
            .collect::<Vec<_>>(),
    )
}

fn execute(cmd: &Command, ctx: &mut Ctx) -> Result<Outcome, Failure> {
    match cmd {
        Command::Components { space, scale } => {
            let x = ctx.space(&space.space)?;
            let (label, comps) = match scale {
                Some(k) => (json!(k), components_at(&x, *k)),
                None => (json!("stabilized"), x.coarse_components()),
            };
            Ok(Outcome::ok(json!({
                "scale": label,
                "stabilized_at": x.stabilized_at(),
                "count": comps.len(),
                "components": comps
                    .iter()
                    .map(|c| c.iter().map(|&i| x.ground().id(i)).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            })))
        }
        Command::Homology {
            space,
            scale,
            colimit,
            max_dim,
        } => {
            let x = ctx.space(&space.space)?;
            match (scale, colimit) {
                (Some(k), _) => {
                    let h = homology_at_scale(&x, *k, *max_dim, &ctx.config)
                        .map_err(|e| homology_failure(&e))?;
                    Ok(Outcome::ok(json!({
                        "mode": "scale",
                        "scale": k,
                        "homology": homology_value(&h),
                        "betti": betti_value(&h),
                    })))
                }
                (None, _) => {
                    let (h, report) = homology_colimit(&x, *max_dim, &ctx.config);
                    for w in report.warnings {
                        ctx.warn(w);
                    }
                    let per_scale: Vec<Value> = report
                        .per_scale
                        .iter()
                        .map(|(k, r)| match r {
                            Ok(h) => json!({"scale": k, "betti": betti_value(h)}),
                            Err(e) => json!({"scale": k, "error": e.to_string()}),
                        })
                        .collect();
                    Ok(Outcome::ok(json!({
                        "mode": "colimit",
                        "stabilized_at": report.stabilized_at,
                        "homology": homology_value(&h),
                        "betti": betti_value(&h),
                        "per_scale": per_scale,
                    })))
                }
            }
        }
        Command::Qhomology {
            space,
            scale,
            max_dim,
        } => {
            let x = ctx.space(&space.space)?;
            let r = coarsify_homology(&x, scale, *max_dim, &ctx.config);
            for n in &r.notes {
                ctx.warn(n.clone());
            }
            let per_scale: Vec<Value> = r
                .per_scale
                .iter()
                .map(|(k, h)| match h {
                    Ok(h) => json!({"scale": k, "homology": homology_value(h), "betti": betti_value(h)}),
                    Err(e) => json!({"scale": k, "error": e.to_string()}),
                })
                .collect();
            let failed = r.per_scale.iter().find_map(|(k, h)| h.as_ref().err().map(|e| (k, e)));
            let results = json!({
                "per_scale": per_scale,
                "stabilized_at": r.stabilized_at,
                "terminal": homology_value(&r.terminal),
                "terminal_betti": betti_value(&r.terminal),
            });
            Ok(match failed {
                Some((k, e)) => Outcome::refused(
                    results,
                    json!({"reason": "measure complex too large", "scale": k, "error": e.to_string()}),
                ),
                None => Outcome::ok(results),
            })
        }
        Command::Nerve {
            space,
            scale,
            max_dim,
        } => {
            let x = ctx.space(&space.space)?;
            let cover = cover_from_net(&x, *scale);
            let n = nerve(&cover, max_dim + 1, &ctx.config).map_err(|e| homology_failure(&e))?;
            let h = n.homology();
            Ok(Outcome::ok(json!({
                "scale": scale,
                "cover": cover_value(&x, &cover),
                "nerve_dimension": cover.nerve_dimension(),
                "simplex_counts": n.counts(),
                "homology": homology_value(&h),
                "betti": betti_value(&h),
            })))
        }
        Command::AntiCech { space, scales } => {
            let x = ctx.space(&space.space)?;
            let scales = resolve_scales(&x, scales)?;
            let p = anti_cech(&x, &scales).map_err(|e| {
                Failure::Refusal(json!({"reason": "anti-Čech certificate refused", "error": e.to_string()}))
            })?;
            ctx.warn("finite prefix of an anti-Čech system");
            Ok(Outcome::ok(prefix_value(&x, &p)))
        }
        Command::Telescope {
            space,
            scales,
            max_dim,
        } => {
            let x = ctx.space(&space.space)?;
            let scales = resolve_scales(&x, scales)?;
            let p = anti_cech(&x, &scales).map_err(|e| {
                Failure::Refusal(json!({"reason": "anti-Čech certificate refused", "error": e.to_string()}))
            })?;
            ctx.warn("telescope over a finite prefix of an anti-Čech system");
            let t = coarsening_space(&p, *max_dim, &ctx.config).map_err(|e| homology_failure(&e))?;
            Ok(Outcome::ok(json!({
                "scales": p.scales,
                "offsets": t.offsets,
                "simplex_counts": t.complex.counts(),
                "homology": homology_value(&t.homology),
                "betti": betti_value(&t.homology),
            })))
        }
        Command::Asdim {
            space,
            scales,
            budget,
        } => {
            let x = ctx.space(&space.space)?;
            let r = asdim_upper_bound(&x, scales, *budget);
            ctx.warn(r.note);
            let per_scale: Vec<Value> = r
                .per_scale
                .iter()
                .map(|s| {
                    json!({
                        "scale": s.scale,
                        "dimension": s.dimension,
                        "witness": s.witness.map(|(n, b, o)| json!({"net_scale": n, "radius": b, "offset": o})),
                        "tried": s.tried,
                    })
                })
                .collect();
            let results = json!({"per_scale": per_scale, "upper_bound": r.upper_bound, "budget": budget});
            Ok(match r.per_scale.iter().find(|s| s.dimension.is_none()) {
                Some(s) => Outcome::refused(
                    results,
                    json!({"reason": "no Lebesgue ball cover found within budget", "scale": s.scale}),
                ),
                None => Outcome::ok(results),
            })
        }
        Command::CheckMorphism { maps, space } => {
            let f = ctx.maps(maps, space, Some(1))?.remove(0);
            let r = check_morphism(&f);
            let id_s = |i: usize| f.source().ground().id(i).to_string();
            let results = json!({
                "controlled": r.controlled,
                "proper": r.proper,
                "is_morphism": r.is_morphism(),
                "scale_shift": r.scale_shift,
            });
            let refusal = if let Some((g, a, b)) = r.controlled_witness {
                Some(json!({
                    "reason": "not controlled",
                    "generator": g,
                    "pair": [id_s(a), id_s(b)],
                    "image": [f.target().ground().id(f.apply(a)), f.target().ground().id(f.apply(b))],
                }))
            } else {
                r.proper_witness.map(|b| {
                    json!({
                        "reason": "not proper",
                        "bornology_generator": b,
                        "set": names(f.target(), &f.target().bornology().generators()[b]),
                    })
                })
            };
            Ok(Outcome { results, refusal })
        }
        Command::Close { maps, space } => {
            let fs = ctx.maps(maps, space, Some(2))?;
            let k = are_close(&fs[0], &fs[1])
                .map_err(|e| refusal(e.to_string()))?;
            let results = json!({"close": k.is_some(), "scale": k});
            Ok(match k {
                Some(_) => Outcome::ok(results),
                None => Outcome::refused(results, json!({"reason": "maps are not close"})),
            })
        }
        Command::Equivalence { maps, space } => {
            let fs = ctx.maps(maps, space, Some(2))?;
            let r = check_equivalence(&fs[0], &fs[1])
                .map_err(|e| refusal(e.to_string()))?;
            let results = json!({
                "equivalent": r.equivalent,
                "source_closeness": r.source_closeness,
                "target_closeness": r.target_closeness,
                "f_is_morphism": r.f_is_morphism,
                "g_is_morphism": r.g_is_morphism,
            });
            Ok(if r.equivalent {
                Outcome::ok(results)
            } else {
                Outcome::refused(results, json!({"reason": "not a coarse equivalence"}))
            })
        }
        Command::Flasque {
            maps,
            space,
            scale_cap,
            iter_cap,
            subsets,
            swindle,
            scale,
            max_dim,
        } => flasque(ctx, maps, space, *scale_cap, *iter_cap, subsets, *swindle, *scale, *max_dim),
        Command::MvCheck {
            space,
            subset: z,
            family: fam,
            scale,
            max_dim,
        } => {
            let x = ctx.space(&space.space)?;
            let z = subset(&x, z)?;
            let fam = family(ctx, &x, fam, *scale)?;
            ctx.warn(format!("family given by a prefix of {} members", fam.len()));
            let r = match mv_check(&x, &z, &fam, *scale, *max_dim, &ctx.config) {
                Ok(r) => r,
                Err(e @ HomologyError::PrefixTooShort { .. }) => {
                    ctx.warn(format!("approximation limit: {e}"));
                    return Err(refusal(e.to_string()));
                }
                Err(e) => return Err(refusal(e.to_string())),
            };
            ctx.warn(format!("quotients taken at family member {}", r.prefix_index));
            let results = json!({
                "scale": r.scale,
                "complementary_index": r.complementary_index,
                "prefix_index": r.prefix_index,
                "degrees": r.degrees.iter().map(|d| json!({
                    "degree": d.degree,
                    "source": d.source.to_string(),
                    "target": d.target.to_string(),
                    "isomorphism": d.isomorphism,
                })).collect::<Vec<_>>(),
                "all_isomorphisms": r.all_isomorphisms(),
            });
            Ok(match r.degrees.iter().find(|d| !d.isomorphism) {
                Some(d) => Outcome::refused(
                    results,
                    json!({"reason": "comparison map is not an isomorphism", "degree": d.degree}),
                ),
                None => Outcome::ok(results),
            })
        }
        Command::Hybrid {
            space,
            family: fam,
            phi,
            scale,
        } => {
            let x = ctx.space(&space.space)?;
            let fam = family(ctx, &x, fam, *scale)?;
            let e = hybrid_entourage(&x, &fam, phi, *scale)
                .map_err(|e| refusal(e.to_string()))?;
            ctx.warn("phi is a finite decreasing list standing in for a cofinal function");
            let id = |i: usize| x.ground().id(i).to_string();
            Ok(Outcome::ok(json!({
                "base_scale": scale,
                "phi": phi,
                "pair_count": e.len(),
                "pairs": e.pairs().map(|(a, b)| json!([id(a), id(b)])).collect::<Vec<_>>(),
            })))
        }
        Command::Udecomp {
            space,
            subsets,
            radii,
        } => {
            let x = ctx.space(&space.space)?;
            if subsets.len() != 2 {
                return Err(usage(format!("expected 2 --subset flags, got {}", subsets.len())));
            }
            let y = subset(&x, &subsets[0])?;
            let z = subset(&x, &subsets[1])?;
            let radii: Vec<Rational> = radii
                .iter()
                .map(|r| parse_rational(r).ok_or_else(|| usage(format!("radius `{r}` is not rational"))))
                .collect::<Result<_, _>>()?;
            let r = uniform_decomposition_check(&x, &y, &z, &radii)
                .map_err(|e| refusal(e.to_string()))?;
            let results = json!({
                "per_radius": r.per_radius.iter().map(|(r, s)| json!({
                    "radius": r.to_string(),
                    "s": s.map(|s| s.to_string()),
                })).collect::<Vec<_>>(),
                "holds": r.holds(),
            });
            Ok(match r.per_radius.iter().find(|(_, s)| s.is_none()) {
                Some((r, _)) => Outcome::refused(
                    results,
                    json!({"reason": "no listed radius absorbs the overlap", "radius": r.to_string()}),
                ),
                None => Outcome::ok(results),
            })
        }
        Command::Snf { matrix } => {
            let text = if Path::new(matrix).is_file() {
                std::fs::read_to_string(matrix).map_err(|e| usage(format!("cannot read {matrix}: {e}")))?
            } else {
                matrix.clone()
            };
            let a = parse_matrix(&text)?;
            ctx.inputs.push(format!("matrix:{:?}", a.to_rows()));
            let r = smith_normal_form(&a);
            Ok(Outcome::ok(json!({
                "rows": a.rows(),
                "cols": a.cols(),
                "u": big_rows(&r.u),
                "s": big_rows(&r.s),
                "v": big_rows(&r.v),
                "invariant_factors": r.invariant_factors().iter().map(int_value).collect::<Vec<_>>(),
                "rank": r.rank(),
            })))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn flasque(
    ctx: &mut Ctx,
    maps: &[String],
    space: &Option<String>,
    scale_cap: usize,
    iter_cap: usize,
    subsets: &[String],
    swindle: bool,
    scale: usize,
    max_dim: usize,
) -> Result<Outcome, Failure> {
    let fs = ctx.maps(maps, space, None)?;
    let x = fs[0].source().clone();
    let tested = if subsets.is_empty() {
        None
    } else {
        Some(subsets.iter().map(|s| subset(&x, s)).collect::<Result<Vec<_>, _>>()?)
    };
    let caps = FlasqueCaps {
        scale_cap,
        iter_cap,
        tested,
    };
    
    if fs.len() > 1 {
        if swindle {
            return Err(usage("--swindle takes a single map"));
        }
        let c = certify_flasque_generalized(&fs, &caps).map_err(|e| refusal(e.to_string()))?;
        ctx.warn(format!("certificate relative to window radius {}", c.window));
        return Ok(Outcome::ok(json!({
            "form": "generalized",
            "window": c.window,
            "scale_cap": c.scale_cap,
            "consecutive_scale": c.consecutive_scale,
            "control_table": c.control_table,
            "escape_table": c.escape_table,
            "tested": c.tested.iter().map(|t| names(&x, t)).collect::<Vec<_>>(),
        })));
    }
    let c = certify_flasque(&fs[0], &caps).map_err(|e| refusal(e.to_string()))?;
    ctx.warn(format!(
        "certificate relative to window radius {} with scale cap {} and iteration cap {}",
        c.window, c.scale_cap, c.iter_cap
    ));
    let mut results = object([
        ("form", json!("single")),
        ("window", json!(c.window)),
        ("scale_cap", json!(c.scale_cap)),
        ("iter_cap", json!(c.iter_cap)),
        ("cond1_scale", json!(c.cond1_scale)),
        ("cond2_table", json!(c.cond2_table)),
        ("cond3_table", json!(c.cond3_table)),
        ("tested", json!(c.tested.iter().map(|t| names(&x, t)).collect::<Vec<_>>())),
    ]);
    if swindle {
        let mut checks = Vec::new();
        let mut failure = None;
        for &(set, escape) in &c.cond3_table {
            let depth = escape.saturating_sub(1);
            for n in 0..=max_dim {
                match swindle_identity_check(&fs[0], &c.tested[set], scale, n, depth, &ctx.config) {
                    Ok(r) => {
                        if failure.is_none() && !r.holds() {
                            failure = Some(json!({
                                "reason": "swindle identity fails",
                                "set": set,
                                "degree": n,
                                "tuple": r.failure.as_ref().map(|t| t.iter().map(|&i| x.ground().id(i)).collect::<Vec<_>>()),
                            }));
                        }
                        checks.push(json!({
                            "set": set, "degree": n, "scale": r.scale, "depth": r.depth,
                            "checked": r.checked, "holds": r.holds(),
                        }));
                    }
                    Err(e) => {
                        if failure.is_none() {
                            failure = Some(json!({"reason": e.to_string(), "set": set, "degree": n}));
                        }
                    }
                }
            }
        }
        results["swindle"] = Value::from(checks);
        if let Some(f) = failure {
            return Ok(Outcome::refused(results, f));
        }
    }
    Ok(Outcome::ok(results))
}

/// Echo of the arguments after the program name, without `--out` and its value.
fn echo(args: &[String]) -> String {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" {
            skip = true;
            continue;
        }
        if a.starts_with("--out=") {
            continue;
        }
        out.push(a.as_str());
    }
    out.join(" ")
}

/// Runs one command line (including the program name) to completion.
/// Exit codes: 0 success, 1 refusal or domain error, 2 usage or parse error.
pub fn run<I, S>(args: I) -> CliOutcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 {
                CliOutcome {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                CliOutcome {
                    stdout: String::new(),
                    stderr: text,
                    code: 2,
                }
            };
        }
    };
    let mut ctx = Ctx {
        inputs: Vec::new(),
        warnings: Vec::new(),
        config: EngineConfig {
            basis_cap: cli.basis_cap,
        },
    };
    let outcome = match execute(&cli.command, &mut ctx) {
        Ok(o) => o,
        Err(Failure::Usage(m)) => {
            return CliOutcome {
                stdout: String::new(),
                stderr: format!("error: {m}\n"),
                code: 2,
            }
        }
        Err(Failure::Refusal(r)) => Outcome::refused(Value::Object(Default::default()), r),
    };
    let report = Report {
        command: echo(&args),
        input_digest: digest(&ctx.inputs),
        results: outcome.results,
        refusal: outcome.refusal,
        warnings: ctx.warnings,
    };
    let text = match cli.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    let code = report.exit_code();
    match &cli.out {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => CliOutcome {
                stdout: String::new(),
                stderr: String::new(),
                code,
            },
            Err(e) => CliOutcome {
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
                code: 2,
            },
        },
        None => CliOutcome {
            stdout: text,
            stderr: String::new(),
            code,
        },
    }
}

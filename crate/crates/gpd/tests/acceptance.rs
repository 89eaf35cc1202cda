//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. All comparisons are exact integer
//! equality.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use gpd::engine::{diagram_par, Families};
use gpd::format::{parse_module, print_bifiltration};
use gpd::json::BettiJson;
use gpd_core::betti::{
    betti_corner, betti_gpd, betti_gpd_int, betti_koszul, corner_types, koszul_at, BettiTable, CornerMask,
};
use gpd_core::complexes::{homology_module, random_bifiltration, Bifiltration, Simplex};
use gpd_core::diagram::{
    dgm_from_ranks, dgm_int_via_covers, find_negative_witness, verify_inversion, PersistenceDiagram,
};
use gpd_core::gridmod::{random_module, Barcode, RandomKind};
use gpd_core::posets::{count_intervals, enumerate_intervals, Mobius, PointSet, RegionFamily};
use gpd_core::rank::{generalized_rank, RankInvariant};
use gpd_core::{Field, Grid, GridModule, Point};

const GRIDS: [(usize, usize); 10] = [
    (1, 1),
    (2, 1),
    (1, 2),
    (2, 2),
    (3, 2),
    (2, 3),
    (3, 3),
    (4, 3),
    (3, 4),
    (4, 4),
];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Source {
    IntervalSum,
    Presentation,
    Homology,
}

struct Sample {
    label: String,
    source: Source,
    module: GridModule,
    barcode: Option<Barcode>,
}

struct Analysis {
    int: (RankInvariant, PersistenceDiagram),
    // only on grids up to [2]×[2]
    con: Option<(RankInvariant, PersistenceDiagram)>,
    cost: Duration,
}

fn small(g: Grid) -> bool {
    g.m <= 2 && g.n <= 2
}

fn corpus() -> Vec<Sample> {
    let mut out = Vec::new();
    for (m, n) in GRIDS {
        let grid = Grid::new(m, n);
        for seed in 0..24 {
            let (module, barcode) = random_module(seed, grid, Field::GF2, RandomKind::IntervalSum);
            out.push(Sample {
                label: format!("interval-sum {m}x{n} seed {seed}"),
                source: Source::IntervalSum,
                module,
                barcode,
            });
        }
        for seed in 0..12 {
            let field = if seed % 2 == 0 {
                Field::GF2
            } else {
                Field::new(3).unwrap()
            };
            let (module, _) = random_module(seed, grid, field, RandomKind::Presentation);
            out.push(Sample {
                label: format!("presentation {m}x{n} seed {seed}"),
                source: Source::Presentation,
                module,
                barcode: None,
            });
        }
        for seed in 0..3 {
            let b = random_bifiltration(seed, grid, 4);
            for k in 0..2 {
                out.push(Sample {
                    label: format!("H{k} bifiltration {m}x{n} seed {seed}"),
                    source: Source::Homology,
                    module: homology_module(&b, k, Field::GF2).unwrap(),
                    barcode: None,
                });
            }
        }
    }
    out
}

fn analyse(samples: &[Sample], families: &Families) -> Vec<Analysis> {
    samples
        .par_iter()
        .map(|s| {
            let start = Instant::now();
            let grid = s.module.grid();
            let int = diagram_par(&s.module, families.int(grid)).unwrap();
            let con = small(grid).then(|| diagram_par(&s.module, families.con(grid, false).unwrap()).unwrap());
            Analysis {
                int,
                con,
                cost: start.elapsed(),
            }
        })
        .collect()
}

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(budget: Duration, spent: Duration) -> Result<(), String> {
    ensure(spent <= budget, || {
        format!("took {} ms, budget {} ms", spent.as_millis(), budget.as_millis())
    })
}

fn barcode_recovery(samples: &[Sample], analyses: &[Analysis]) -> Verdict {
    let start = Instant::now();
    let mut sums = 0;
    let mut con_checked = 0;
    let mut spent = Duration::ZERO;
    for (s, a) in samples.iter().zip(analyses) {
        let Some(barcode) = &s.barcode else { continue };
        sums += 1;
        spent += a.cost;
        let d = &a.int.1;
        let family = d.family();
        for i in 0..family.len() {
            let want = barcode.get(family.interval(i).unwrap()).copied().unwrap_or(0) as i64;
            ensure(d.get(i) == want, || {
                format!("{}: region {i} has {} expected {want}", s.label, d.get(i))
            })?;
        }
        if let Some((_, dc)) = &a.con {
            con_checked += 1;
            let family = dc.family();
            for i in 0..family.len() {
                let want = match family.interval(i) {
                    Some(interval) => barcode.get(interval).copied().unwrap_or(0) as i64,
                    None => 0,
                };
                ensure(dc.get(i) == want, || {
                    format!("{}: Con region {i} has {} expected {want}", s.label, dc.get(i))
                })?;
            }
        }
    }
    ensure(sums >= 200, || format!("only {sums} interval sums"))?;
    within(Duration::from_secs(60), spent + start.elapsed())?;
    Ok(format!("{sums} interval sums, {con_checked} also over Con"))
}

fn betti_agreement(samples: &[Sample], analyses: &[Analysis]) -> Verdict {
    let start = Instant::now();
    let mut con_checked = 0;
    let mut spent = Duration::ZERO;
    for (s, a) in samples.iter().zip(analyses) {
        spent += a.cost;
        let koszul = betti_koszul(&s.module);
        ensure(koszul.is_nonnegative(), || {
            format!("{}: negative Koszul entry", s.label)
        })?;
        let d = &a.int.1;
        ensure(betti_gpd_int(d).unwrap() == koszul, || {
            format!("{}: gpd-int differs from Koszul", s.label)
        })?;
        ensure(betti_corner(d).unwrap() == koszul, || {
            format!("{}: corner differs from Koszul", s.label)
        })?;
        if let Some((_, dc)) = &a.con {
            con_checked += 1;
            ensure(betti_gpd(dc).unwrap() == koszul, || {
                format!("{}: gpd differs from Koszul", s.label)
            })?;
        }
    }
    let count = |src| samples.iter().filter(|s| s.source == src).count();
    ensure(samples.len() >= 200, || format!("only {} modules", samples.len()))?;
    within(Duration::from_secs(120), spent + start.elapsed())?;
    Ok(format!(
        "{} modules ({} interval sums, {} presentations, {} homology), {con_checked} also over Con",
        samples.len(),
        count(Source::IntervalSum),
        count(Source::Presentation),
        count(Source::Homology)
    ))
}

fn interval_corner_law() -> Verdict {
    let grid = Grid::new(3, 3);
    let big = Grid::new(4, 4);
    let intervals = enumerate_intervals(grid);
    ensure(intervals.len() as u128 == count_intervals(grid), || {
        "interval enumeration is incomplete".into()
    })?;
    for interval in &intervals {
        // on [3]×[3] itself: the table agrees with τ on the grid, and the
        // outer strip is zero because the module is constant beyond it
        let v = GridModule::interval_module(grid, interval, Field::GF2).unwrap();
        let table = betti_koszul(&v);
        for p in grid.expanded().points() {
            let want = if grid.contains(p) {
                corner_types(interval, p)
            } else {
                [0; 3]
            };
            ensure(table.get(p) == want, || {
                format!("{interval:?} on [3]x[3] at {p:?}: {:?} vs {want:?}", table.get(p))
            })?;
        }
        // embedded in [4]×[4]: every corner of the expansion, everywhere
        let v = GridModule::interval_module(big, interval, Field::GF2).unwrap();
        let e = v.encoded();
        for x in -2..=7 {
            for y in -2..=7 {
                let p = Point::new(x, y);
                let want = corner_types(interval, p);
                ensure(koszul_at(&e, p) == want, || format!("{interval:?} in [4]x[4] at {p:?}"))?;
            }
        }
    }
    Ok(format!(
        "all {} intervals of [3]x[3], clipped and embedded",
        intervals.len()
    ))
}

fn zigzag_mobius() -> Result<(), String> {
    let g = Grid::new(1, 1);
    let pt = Point::new;
    let support = PointSet::from_points(g, [pt(0, 1), pt(1, 1), pt(1, 0)]).unwrap();
    let family = Arc::new(RegionFamily::connected_within(g, &support));
    ensure(family.len() == 6, || format!("zigzag has {} regions", family.len()))?;
    let idx = |pts: &[Point]| {
        family
            .index_of(&PointSet::from_points(g, pts.iter().copied()).unwrap())
            .unwrap()
    };
    let (s1, s2, s3) = (idx(&[pt(0, 1)]), idx(&[pt(1, 1)]), idx(&[pt(1, 0)]));
    let (s12, s23) = (idx(&[pt(0, 1), pt(1, 1)]), idx(&[pt(1, 1), pt(1, 0)]));
    let s123 = idx(&[pt(0, 1), pt(1, 1), pt(1, 0)]);
    let formulas: [(usize, Vec<(usize, i64)>); 6] = [
        (s1, vec![(s1, 1), (s12, -1)]),
        (s3, vec![(s3, 1), (s23, -1)]),
        (s2, vec![(s2, 1), (s12, -1), (s23, -1), (s123, 1)]),
        (s12, vec![(s12, 1), (s123, -1)]),
        (s23, vec![(s23, 1), (s123, -1)]),
        (s123, vec![(s123, 1)]),
    ];
    let mut mu = Mobius::new(&family);
    for (i, terms) in &formulas {
        for j in 0..family.len() {
            let want = terms.iter().find(|t| t.0 == j).map_or(0, |t| t.1);
            ensure(mu.value(j, *i) == want, || {
                format!("zigzag mu({j},{i}) = {} expected {want}", mu.value(j, *i))
            })?;
        }
    }
    for seed in 0..20 {
        let (m, _) = random_module(seed, g, Field::new(3).unwrap(), RandomKind::Presentation);
        let ranks: Vec<usize> = family.sets().iter().map(|s| generalized_rank(&m, s).unwrap()).collect();
        let d = dgm_from_ranks(family.clone(), &ranks);
        for (i, terms) in &formulas {
            let want: i64 = terms.iter().map(|&(j, c)| c * ranks[j] as i64).sum();
            ensure(d.get(*i) == want, || format!("zigzag seed {seed}: region {i}"))?;
        }
    }
    Ok(())
}

fn mobius_round_trip(samples: &[Sample], analyses: &[Analysis]) -> Verdict {
    let mut con_checked = 0;
    for (s, a) in samples.iter().zip(analyses) {
        verify_inversion(&a.int.0, &a.int.1).map_err(|e| format!("{} (Int): {e}", s.label))?;
        if let Some((rk, d)) = &a.con {
            con_checked += 1;
            verify_inversion(rk, d).map_err(|e| format!("{} (Con): {e}", s.label))?;
        }
    }
    zigzag_mobius()?;
    Ok(format!(
        "{} modules over Int, {con_checked} over Con, zigzag six formulas",
        samples.len()
    ))
}

fn cover_formula(samples: &[Sample], analyses: &[Analysis], families: &Families) -> Verdict {
    samples.par_iter().zip(analyses).try_for_each(|(s, a)| {
        let covers = families.int_covers(s.module.grid());
        let via = dgm_int_via_covers(&a.int.0, Some(covers.as_slice())).map_err(|e| e.to_string())?;
        ensure(via == a.int.1, || format!("{}: cover formula differs", s.label))
    })?;
    Ok(format!("{} modules", samples.len()))
}

fn monotonicity(samples: &[Sample], analyses: &[Analysis], families: &Families) -> Verdict {
    let mut exhaustive = 0usize;
    let mut sampled = 0usize;
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d6f6e6f);
    for (s, a) in samples.iter().zip(analyses) {
        let grid = s.module.grid();
        let mut rks = vec![&a.int.0];
        if let Some((rk, _)) = &a.con {
            rks.push(rk);
        }
        if small(grid) {
            for rk in rks {
                let sets = rk.family.sets();
                for (i, si) in sets.iter().enumerate() {
                    for (j, sj) in sets.iter().enumerate() {
                        if sj.contains_set(si) {
                            exhaustive += 1;
                            ensure(rk.ranks[j] <= rk.ranks[i], || format!("{}: rk({j}) > rk({i})", s.label))?;
                        }
                    }
                }
            }
        } else {
            // random chains of covers give random nested pairs at every distance
            let rk = &a.int.0;
            let covers = families.int_covers(grid);
            for _ in 0..300 {
                let i = rng.gen_range(0..rk.ranks.len());
                let mut j = i;
                for _ in 0..rng.gen_range(1..=grid.len()) {
                    if covers[j].is_empty() {
                        break;
                    }
                    j = covers[j][rng.gen_range(0..covers[j].len())];
                }
                ensure(rk.family.set(j).contains_set(rk.family.set(i)), || {
                    "cover chain left the up-set".into()
                })?;
                sampled += 1;
                ensure(rk.ranks[j] <= rk.ranks[i], || format!("{}: rk({j}) > rk({i})", s.label))?;
            }
        }
    }
    Ok(format!(
        "{exhaustive} nested pairs exhaustively on small grids, {sampled} sampled on larger ones"
    ))
}

fn hilbert_recovery(samples: &[Sample], analyses: &[Analysis]) -> Verdict {
    for (s, a) in samples.iter().zip(analyses) {
        for p in s.module.grid().points() {
            let dim = s.module.dim(p) as i64;
            ensure(a.int.1.hilbert(p) == dim, || {
                format!("{}: Int Hilbert at {p:?}", s.label)
            })?;
            if let Some((_, dc)) = &a.con {
                ensure(dc.hilbert(p) == dim, || format!("{}: Con Hilbert at {p:?}", s.label))?;
            }
        }
    }
    Ok(format!("{} modules", samples.len()))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn negative_witness(families: &Families) -> Verdict {
    let grid = Grid::new(2, 2);
    let (seed, module, d) = find_negative_witness(grid, Field::GF2, 0..2000).ok_or("no witness below seed 2000")?;
    let frozen = parse_module(&fs::read_to_string(data("negative_witness.gpdmod")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure(frozen == module, || {
        format!("seed {seed} no longer matches the frozen witness")
    })?;
    let negative: Vec<i64> = d.values().iter().copied().filter(|&v| v < 0).collect();
    ensure(!negative.is_empty(), || "no negative entry".into())?;
    let koszul = betti_koszul(&module);
    ensure(betti_gpd_int(&d).unwrap() == koszul, || "gpd-int differs".into())?;
    ensure(betti_corner(&d).unwrap() == koszul, || "corner differs".into())?;
    let (_, dc) = diagram_par(&module, families.con(grid, false).unwrap()).unwrap();
    ensure(betti_gpd(&dc).unwrap() == koszul, || "gpd differs".into())?;
    Ok(format!(
        "seed {seed}, {} negative entries, all four routes agree",
        negative.len()
    ))
}

fn ring(grid: Grid) -> impl Iterator<Item = Point> {
    let (m, n) = (grid.m as i64, grid.n as i64);
    (-2..=m + 3)
        .flat_map(move |x| (-2..=n + 3).map(move |y| Point::new(x, y)))
        .filter(move |p| !(0..=m + 1).contains(&p.x) || !(0..=n + 1).contains(&p.y))
}

fn masked(d: &PersistenceDiagram, p: Point, coefficients: fn(CornerMask) -> [i64; 3]) -> [i64; 3] {
    let grid = d.grid();
    let family = d.family();
    let mut acc = [0; 3];
    for (j, v) in d.nonzero() {
        let s = family.set(j);
        let c = coefficients(CornerMask::of(p, |q| grid.contains(q) && s.contains_point(grid, q)));
        for k in 0..3 {
            acc[k] += c[k] * v;
        }
    }
    acc
}

fn support_bound(samples: &[Sample], analyses: &[Analysis]) -> Verdict {
    let mut points = 0usize;
    for (s, a) in samples.iter().zip(analyses) {
        let grid = s.module.grid();
        let e = s.module.encoded();
        let d = &a.int.1;
        for p in ring(grid) {
            points += 1;
            ensure(koszul_at(&e, p) == [0; 3], || {
                format!("{}: Koszul nonzero at {p:?}", s.label)
            })?;
            let mut corner = [0; 3];
            for (j, v) in d.nonzero() {
                let t = corner_types(d.family().interval(j).unwrap(), p);
                for k in 0..3 {
                    corner[k] += v * t[k];
                }
            }
            ensure(corner == [0; 3], || {
                format!("{}: corner route nonzero at {p:?}", s.label)
            })?;
            ensure(masked(d, p, CornerMask::interval_coefficients) == [0; 3], || {
                format!("{}: gpd-int at {p:?}", s.label)
            })?;
            if let Some((_, dc)) = &a.con {
                ensure(masked(dc, p, CornerMask::coefficients) == [0; 3], || {
                    format!("{}: gpd at {p:?}", s.label)
                })?;
            }
        }
    }
    Ok(format!(
        "{} modules, {points} points outside [m+1]x[n+1]",
        samples.len()
    ))
}

/// `dim H0` at every grade by Gaussian elimination of the edge boundary
/// matrix over GF(2).
fn h0_oracle(b: &Bifiltration) -> Vec<usize> {
    let grid = b.grid();
    grid.points()
        .map(|p| {
            let present: Vec<&Simplex> = b.simplices().iter().filter(|s| s.grade.leq(p)).collect();
            let verts: Vec<u32> = present
                .iter()
                .filter(|s| s.vertices.len() == 1)
                .map(|s| s.vertices[0])
                .collect();
            let mut rows: Vec<u64> = present
                .iter()
                .filter(|s| s.vertices.len() == 2)
                .map(|s| {
                    s.vertices
                        .iter()
                        .map(|v| 1u64 << verts.iter().position(|w| w == v).unwrap())
                        .fold(0, |a, b| a ^ b)
                })
                .collect();
            let mut rank = 0;
            for bit in 0..verts.len() {
                if let Some(k) = (rank..rows.len()).find(|&k| rows[k] >> bit & 1 == 1) {
                    rows.swap(rank, k);
                    for r in 0..rows.len() {
                        if r != rank && rows[r] >> bit & 1 == 1 {
                            rows[r] ^= rows[rank];
                        }
                    }
                    rank += 1;
                }
            }
            verts.len() - rank
        })
        .collect()
}

fn pipeline() -> Verdict {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let grid = Grid::new(1, 1);
    let at = |v: &[u32], x, y| Simplex {
        vertices: v.to_vec(),
        grade: Point::new(x, y),
    };
    let b = Bifiltration::new(grid, vec![at(&[0], 0, 0), at(&[1], 0, 0), at(&[0, 1], 1, 1)]);
    fs::write(path("e.gpdbif"), print_bifiltration(&b)).map_err(|e| e.to_string())?;

    let run = |args: &[&str]| -> Result<(), String> {
        let out = Command::new(env!("CARGO_BIN_EXE_gpd"))
            .args(args)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.code() == Some(0), || {
            format!(
                "gpd {} exited {:?}: {}",
                args[0],
                out.status.code(),
                String::from_utf8_lossy(&out.stderr)
            )
        })
    };
    run(&[
        "homology",
        "--bif",
        &path("e.gpdbif"),
        "--degree",
        "0",
        "--out",
        &path("h0.gpdmod"),
    ])?;
    let h0 = parse_module(&fs::read_to_string(path("h0.gpdmod")).unwrap()).map_err(|e| e.to_string())?;
    let oracle = h0_oracle(&b);
    ensure(h0.dims() == oracle.as_slice(), || {
        format!("dims {:?}, oracle {oracle:?}", h0.dims())
    })?;
    ensure(oracle == [2, 2, 2, 1], || format!("oracle dims {oracle:?}"))?;

    let expected = vec![([0, 0], [2, 0, 0]), ([1, 1], [0, 1, 0])];
    for method in ["koszul", "gpd", "gpd-int", "corner"] {
        let out = path(&format!("betti-{method}.json"));
        run(&[
            "betti",
            "--module",
            &path("h0.gpdmod"),
            "--method",
            method,
            "--out",
            &out,
        ])?;
        let doc: BettiJson = serde_json::from_str(&fs::read_to_string(&out).unwrap()).map_err(|e| e.to_string())?;
        let got: Vec<([i64; 2], [i64; 3])> = doc.betti.iter().map(|e| (e.p, [e.b0, e.b1, e.b2])).collect();
        ensure(got == expected, || format!("{method}: {got:?}"))?;
        // Euler characteristic of the oracle dims at every grade
        let mut table = BettiTable::zeros(grid);
        for (p, v) in got {
            table.set(Point::new(p[0], p[1]), v);
        }
        for p in grid.expanded().points() {
            let dim = |q: Point| {
                grid.points()
                    .position(|r| Some(r) == h0.encoded().clamp(q))
                    .map_or(0, |i| oracle[i] as i64)
            };
            let chi = dim(p) - dim(p.offset(-1, 0)) - dim(p.offset(0, -1)) + dim(p.offset(-1, -1));
            let [b0, b1, b2] = table.get(p);
            ensure(b0 - b1 + b2 == chi, || {
                format!("{method}: Euler characteristic at {p:?}")
            })?;
        }
    }
    run(&["check", "--module", &path("h0.gpdmod")])?;
    Ok("homology, betti (four methods) and check exit 0; dims [[2,2],[2,1]], b0(0,0)=2, b1(1,1)=1".into())
}

fn main() {
    let families = Families::new();
    let start = Instant::now();
    let samples = corpus();
    let analyses = analyse(&samples, &families);
    let setup = start.elapsed();

    type Criterion<'a> = (&'a str, Box<dyn Fn() -> Verdict + 'a>);
    let criteria: Vec<Criterion> = vec![
        ("barcode recovery", Box::new(|| barcode_recovery(&samples, &analyses))),
        (
            "Betti route agreement",
            Box::new(|| betti_agreement(&samples, &analyses)),
        ),
        ("interval corner law", Box::new(interval_corner_law)),
        ("Mobius round trip", Box::new(|| mobius_round_trip(&samples, &analyses))),
        (
            "cover-formula equivalence",
            Box::new(|| cover_formula(&samples, &analyses, &families)),
        ),
        (
            "monotonicity",
            Box::new(|| monotonicity(&samples, &analyses, &families)),
        ),
        ("Hilbert recovery", Box::new(|| hilbert_recovery(&samples, &analyses))),
        (
            "negative-multiplicity witness",
            Box::new(|| negative_witness(&families)),
        ),
        ("support bound", Box::new(|| support_bound(&samples, &analyses))),
        ("pipeline end to end", Box::new(pipeline)),
    ];

    println!(
        "acceptance: {} corpus modules analysed in {} ms",
        samples.len(),
        setup.as_millis()
    );
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let ms = t.elapsed().as_millis();
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({ms} ms)", n + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({ms} ms)", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

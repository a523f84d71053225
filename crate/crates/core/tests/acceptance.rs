//! One line per acceptance criterion. Exact comparisons throughout; the
//! only tolerances are the wall-clock limits printed with each line.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use packinglab::arithmetic::{dual_form, gram_matrix, is_rational_matrix, quadratic_value, vinberg_test, ClusterMatrix, VinbergVerdict};
use packinglab::exactnum::QuadExt;
use packinglab::fixtures;
use packinglab::geometrize::{geometrize, verify_realization, PipelineOptions};
use packinglab::inversive::{InversiveVector, QForm, ReflectionMatrix};
use packinglab::localglobal::{bends_generators, residue_orbit};
use packinglab::orbit::{certify_integral, generate_packing, generate_superpacking, Packing};
use packinglab::structure::enumerate_decompositions;

const APOLLONIAN_BOUND: i64 = 1000;

type Outcome = Result<String, String>;

fn check(cond: bool, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn hexpyr_gram() -> Outcome {
    let ws = fixtures::system("hexpyr").map_err(err)?;
    let computed = gram_matrix(&ClusterMatrix::new(ws.walls().to_vec()).map_err(err)?).map_err(err)?;
    let published = fixtures::gram("hexpyr-gram").map_err(err)?;
    check(published.size() == 14, "published matrix is not 14x14")?;
    let (a, b) = (computed.matrix().map_err(err)?, published.matrix().map_err(err)?);
    let diffs = (0..14).flat_map(|i| (0..14).map(move |j| (i, j))).filter(|&(i, j)| a[(i, j)] != b[(i, j)]).count();
    check(diffs == 0, &format!("{diffs} entries differ"))?;
    Ok("196 entries equal".into())
}

fn hexpyr_witness() -> Outcome {
    let g = fixtures::gram("hexpyr-gram").map_err(err)?;
    check(g.get(0, 13) == Some(&"2/3*sqrt(3)".parse().unwrap()), "entry (1,14) is not 2/sqrt(3)")?;
    match vinberg_test(&g, 8).map_err(err)? {
        VinbergVerdict::NonArithmetic { cycle, product } if cycle == [0, 13] && product == QuadExt::frac(16, 3) => {
            Ok("cycle (1,14), product 16/3".into())
        }
        other => Err(format!("unexpected verdict {other:?}")),
    }
}

fn decompositions() -> Outcome {
    let cox6 = enumerate_decompositions(&fixtures::gram("cox6").map_err(err)?).map_err(err)?;
    check(cox6.iter().any(|d| d.cluster == [0] && d.cocluster == [1, 2, 3, 4, 5]), "cox6 lacks C={1}")?;
    let eis = enumerate_decompositions(&fixtures::gram("eisenstein").map_err(err)?).map_err(err)?;
    let singles: Vec<usize> = eis.iter().filter(|d| d.cluster.len() == 1).map(|d| d.cluster[0]).collect();
    check(singles == [0, 2], &format!("eisenstein singleton clusters {singles:?}"))?;
    Ok(format!("cox6 has C={{1}} among {}, eisenstein singletons {{1}} and {{3}}", cox6.len()))
}

/// Descartes recursion from the root quadruple: replace `b_i` by
/// `2(sum of the others) - b_i`, never undoing the previous move.
fn descartes_oracle(root: [i64; 4], bound: i64) -> BTreeMap<i64, usize> {
    fn go(q: [i64; 4], last: Option<usize>, bound: i64, out: &mut BTreeMap<i64, usize>) {
        for i in 0..4 {
            if Some(i) == last {
                continue;
            }
            let b = 2 * (q.iter().sum::<i64>() - q[i]) - q[i];
            if b <= bound {
                *out.entry(b).or_default() += 1;
                let mut next = q;
                next[i] = b;
                go(next, Some(i), bound, out);
            }
        }
    }
    let mut out = BTreeMap::new();
    for b in root {
        *out.entry(b).or_default() += 1;
    }
    go(root, None, bound, &mut out);
    out
}

fn apollonian_packing() -> Result<Packing, String> {
    let ws = fixtures::system("apollonian").map_err(err)?;
    generate_packing(&ws, &QuadExt::from(APOLLONIAN_BOUND), 10_000).map_err(err)
}

fn apollonian_integrality(p: &Packing) -> Outcome {
    check(p.saturated, "packing not saturated")?;
    check(certify_integral(p).integral, "non-integral bend")?;
    let mut got: BTreeMap<i64, usize> = BTreeMap::new();
    for s in &p.spheres {
        let b = s.bend().to_integer().ok_or("non-integral bend")?;
        *got.entry(i64::try_from(b).map_err(err)?).or_default() += 1;
    }
    let want = descartes_oracle([-1, 2, 2, 3], APOLLONIAN_BOUND);
    check(got == want, "bend multiset differs from the Descartes oracle")?;
    Ok(format!("{} circles, multiset equals oracle", p.len()))
}

fn hexpyr_separation() -> Outcome {
    let ws = fixtures::system("hexpyr").map_err(err)?;
    let p = generate_packing(&ws, &QuadExt::from(300), 10_000).map_err(err)?;
    let rep = certify_integral(&p);
    check(p.saturated && rep.integral, "packing not integral")?;
    let sp = generate_superpacking(&ws, &QuadExt::from(30), 3).map_err(err)?;
    let srep = certify_integral(&sp);
    let w = srep.witnesses.first().ok_or("superpacking has no non-integral bend")?;
    Ok(format!("{} integral circles; superpacking witness bend {} via walls {:?}", p.len(), w.bend, w.word))
}

fn dual_form_cone(p: &Packing) -> Outcome {
    let ws = fixtures::system("apollonian").map_err(err)?;
    let f = dual_form(&gram_matrix(&ClusterMatrix::new(ws.cluster_walls()).map_err(err)?).map_err(err)?).map_err(err)?;
    check(is_rational_matrix(&f), "F is not rational")?;
    let n = p.len().min(400);
    let one = QuadExt::one();
    let tangent: Vec<Vec<bool>> =
        (0..n).map(|i| (0..n).map(|j| i != j && p.spheres[i].product(&p.spheres[j]).unwrap() == one).collect()).collect();
    let mut checked = 0;
    for a in 0..n {
        for b in a + 1..n {
            if !tangent[a][b] {
                continue;
            }
            for c in b + 1..n {
                if !(tangent[a][c] && tangent[b][c]) {
                    continue;
                }
                for d in c + 1..n {
                    if tangent[a][d] && tangent[b][d] && tangent[c][d] {
                        let bends: Vec<QuadExt> = [a, b, c, d].iter().map(|&k| p.spheres[k].bend().clone()).collect();
                        check(quadratic_value(&f, &bends).map_err(err)?.is_zero(), &format!("quadruple {bends:?} off the cone"))?;
                        checked += 1;
                    }
                }
            }
        }
    }
    check(checked >= 100, &format!("only {checked} quadruples"))?;
    Ok(format!("{checked} tangent quadruples on the cone"))
}

fn random_wall(rng: &mut ChaCha8Rng) -> InversiveVector {
    let q = |rng: &mut ChaCha8Rng| {
        let r = QuadExt::frac(rng.gen_range(-40..=40), rng.gen_range(1..=12));
        if rng.gen_bool(0.5) {
            &r + &QuadExt::surd_frac(rng.gen_range(-20..=20), rng.gen_range(1..=12), 2).unwrap()
        } else {
            r
        }
    };
    if rng.gen_ratio(1, 6) {
        let normals = [[1, 0], [0, 1], [-1, 0], [0, -1]];
        let n: Vec<QuadExt> = normals[rng.gen_range(0..4)].iter().map(|&x| QuadExt::from(x)).collect();
        return InversiveVector::plane_from_normal_offset(&n, &q(rng)).unwrap();
    }
    let z = [q(rng), q(rng)];
    let mut r = q(rng);
    while r.is_zero() {
        r = q(rng);
    }
    InversiveVector::sphere_from_center_radius(&z, &r).unwrap()
}

fn invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let q = QForm::new(2).matrix();
    let mut failures = 0;
    const TRIALS: usize = 10_000;
    for _ in 0..TRIALS {
        let (u, v, s) = (random_wall(&mut rng), random_wall(&mut rng), random_wall(&mut rng));
        let r = ReflectionMatrix::new(&s).map_err(err)?;
        let (ur, vr) = (u.apply(r.matrix()).map_err(err)?, v.apply(r.matrix()).map_err(err)?);
        if ur.product(&vr).map_err(err)? != u.product(&v).map_err(err)? {
            failures += 1;
        }
        if !r.matrix().try_mul(r.matrix()).map_err(err)?.is_identity() {
            failures += 1;
        }
        let mut m = r.matrix().clone();
        for _ in 0..rng.gen_range(0..2) {
            m = m.try_mul(ReflectionMatrix::new(&random_wall(&mut rng)).map_err(err)?.matrix()).map_err(err)?;
        }
        if m.try_mul(&q).map_err(err)?.try_mul(&m.transpose()).map_err(err)? != q {
            failures += 1;
        }
    }
    check(failures == 0, &format!("{failures} failures"))?;
    Ok(format!("{TRIALS} trials x 3 identities, 0 failures"))
}

fn pipeline() -> Outcome {
    let mut parts = Vec::new();
    for (name, d) in [("tetrahedron-target", 0), ("cuboctahedron-target", 6)] {
        let t = fixtures::target(name).map_err(err)?;
        let opts = PipelineOptions { d, denom_bound: 64, ..PipelineOptions::default() };
        let r = geometrize(&t, &opts).map_err(|e| format!("{name}: {e}"))?;
        check(verify_realization(r.system.walls(), &t).ok, &format!("{name} failed exact verification"))?;
        parts.push(format!("{name} exact (seed {})", r.seed));
    }
    Ok(parts.join(", "))
}

fn soundness(p: &Packing) -> Outcome {
    let ws = fixtures::system("apollonian").map_err(err)?;
    let gens = bends_generators(&ws).map_err(err)?;
    let b: Vec<QuadExt> = ws.cluster_walls().iter().map(|w| w.bend().clone()).collect();
    let bends: Vec<BigInt> = p.spheres.iter().map(|s| s.bend().to_integer().ok_or("non-integral bend")).collect::<Result<_, _>>()?;
    let mut violations = 0;
    for m in [2, 3, 8, 24] {
        let ro = residue_orbit(&gens, &b, m).map_err(err)?;
        violations += bends.iter().filter(|x| !ro.admits(x)).count();
    }
    check(violations == 0, &format!("{violations} violations"))?;
    Ok(format!("{} bends admissible mod 2, 3, 8, 24", bends.len()))
}

fn report(n: usize, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = f();
    let t = start.elapsed();
    let (ok, detail) = match outcome {
        Ok(d) if t < limit => (true, d),
        Ok(d) => (false, format!("{d}; too slow")),
        Err(e) => (false, e),
    };
    println!(
        "criterion {n}: {} ({detail}; {:.3}s, limit {}s)",
        if ok { "PASS" } else { "FAIL" },
        t.as_secs_f64(),
        limit.as_secs()
    );
    ok
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut ok = true;
    ok &= report(1, secs(1), hexpyr_gram);
    ok &= report(2, secs(1), hexpyr_witness);
    ok &= report(3, secs(1), decompositions);

    let mut packing: Option<Packing> = None;
    ok &= report(4, secs(30), || {
        let p = apollonian_packing()?;
        let d = apollonian_integrality(&p)?;
        packing = Some(p);
        Ok(d)
    });
    ok &= report(5, secs(60), hexpyr_separation);
    ok &= report(6, secs(10), || dual_form_cone(packing.as_ref().ok_or("no packing from criterion 4")?));
    ok &= report(7, secs(600), invariance);
    ok &= report(8, secs(60), pipeline);
    ok &= report(9, secs(30), || soundness(packing.as_ref().ok_or("no packing from criterion 4")?));
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Acceptance gate: one test per criterion, each printing a PASS line
//! with the measured quantities. Everything is exact rational arithmetic,
//! so every comparison here is at zero tolerance.

use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use voronoi_forms::conefan::{cocore_height, direct_sum, extend, locate_cone, FanContext};
use voronoi_forms::exact::{rank1, sym_dim, transform, IntVector, QuadForm, SymLatticePoint};
use voronoi_forms::perfection::{enumerate_perfect, perfection_rank, PerfectFormRecord};
use voronoi_forms::picard::{canonical_class, is_ample, is_nef, DivisorClass};
use voronoi_forms::shell::{catalog_to_file, catalog_verify};
use voronoi_forms::shortvec::minimal_vectors;
use voronoi_forms::taibound::{min_fractional_sum, TaiProblem, ZeroConvention};
use voronoi_forms::toricsing::{
    classify_singularity, SingularityClass, ToricCone, DEFAULT_SCAN_BUDGET,
};
use voronoi_forms::{Int, Rat};

fn rat(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

fn d4() -> QuadForm {
    QuadForm::from_i64_rows(&[
        &[2, 0, -1, 0],
        &[0, 2, -1, 0],
        &[-1, -1, 2, -1],
        &[0, 0, -1, 2],
    ])
    .unwrap()
}

fn d5() -> QuadForm {
    QuadForm::from_i64_rows(&[
        &[2, 0, -1, 0, 0],
        &[0, 2, -1, 0, 0],
        &[-1, -1, 2, -1, 0],
        &[0, 0, -1, 2, -1],
        &[0, 0, 0, -1, 2],
    ])
    .unwrap()
}

/// Full closure check of a catalog: every crossable facet linked, links
/// land inside the catalog, the link relation is symmetric at class
/// level, and the stored file re-verifies independently.
fn check_closure(g: usize, records: &[PerfectFormRecord]) {
    for (id, rec) in records.iter().enumerate() {
        let crossable: Vec<usize> = rec
            .cone
            .facets()
            .iter()
            .enumerate()
            .filter(|(_, f)| !f.incident.is_empty())
            .map(|(i, _)| i)
            .collect();
        let linked: Vec<usize> = rec.neighbors.iter().map(|l| l.facet).collect();
        assert_eq!(crossable, linked, "g={g} class {id}: unlinked facets");
        for link in &rec.neighbors {
            assert!(link.class < records.len());
            assert!(
                records[link.class]
                    .neighbors
                    .iter()
                    .any(|back| back.class == id),
                "g={g}: neighbor relation not symmetric between {id} and {}",
                link.class
            );
        }
    }
    let file = catalog_to_file(g, records).unwrap();
    catalog_verify(&file).unwrap();
}

#[test]
fn criterion_1_perfect_form_counts() {
    let t = Instant::now();
    let expected = [1usize, 1, 1, 2, 3];
    let mut counts = Vec::new();
    for g in 1..=5usize {
        let records = enumerate_perfect(g, None).unwrap();
        check_closure(g, &records);
        counts.push(records.len());
    }
    let elapsed = t.elapsed();
    assert_eq!(counts, expected);
    assert!(
        elapsed.as_secs() <= 60,
        "enumeration took {elapsed:?}, budget is 60 s"
    );
    println!(
        "criterion 1: PASS — perfect-form classes for g=1..5 are {counts:?} with verified closure certificates ({elapsed:?})"
    );
}

/// Stretch target: rank 6 has 7 classes. Run with --ignored; budget 10 min.
#[test]
#[ignore]
fn criterion_1_stretch_rank_six() {
    let t = Instant::now();
    let records = enumerate_perfect(6, None).unwrap();
    let elapsed = t.elapsed();
    assert_eq!(records.len(), 7);
    check_closure(6, &records);
    assert!(elapsed.as_secs() <= 600);
    println!("criterion 1 (stretch): PASS — 7 classes at g=6 ({elapsed:?})");
}

#[test]
fn criterion_2_kissing_numbers() {
    let cases: Vec<(&str, QuadForm, usize)> = vec![
        ("A2", QuadForm::from_i64_rows(&[&[2, 1], &[1, 2]]).unwrap(), 6),
        ("A3", QuadForm::root_form_a(3), 12),
        ("A4", QuadForm::root_form_a(4), 20),
        ("D4", d4(), 24),
        ("A5", QuadForm::root_form_a(5), 30),
        ("D5", d5(), 40),
    ];
    let mut line = Vec::new();
    for (name, q, expect) in &cases {
        let mv = minimal_vectors(q).unwrap();
        assert_eq!(mv.minimum, rat(2), "{name} minimum");
        assert_eq!(mv.kissing, *expect, "{name} kissing number");
        line.push(format!("{name}={}", mv.kissing));
    }
    println!(
        "criterion 2: PASS — kissing numbers at minimum 2: {}",
        line.join(" ")
    );
}

#[test]
fn criterion_3_tai_computation() {
    let t = Instant::now();
    let p12 = TaiProblem::new(12, ZeroConvention::ZeroAsOne).unwrap();
    let m12 = min_fractional_sum(&p12);
    assert_eq!(m12.value, Rat::one(), "m=12 must give exactly 1");
    let mut others = Vec::new();
    for m in [8u64, 10, 18, 30] {
        let p = TaiProblem::new(m, ZeroConvention::ZeroAsOne).unwrap();
        let min = min_fractional_sum(&p);
        assert!(min.value > Rat::one(), "m={m} minimum must exceed 1");
        others.push(format!("m={m}:{}", min.value));
    }
    let elapsed = t.elapsed();
    assert!(elapsed.as_secs() < 1, "budget is 1 s, took {elapsed:?}");
    println!(
        "criterion 3: PASS — m=12 minimum is exactly 1 (minimizer {:?}); {} all > 1 ({elapsed:?})",
        m12.minimizer,
        others.join(" ")
    );
}

#[test]
fn criterion_4_toric_terminality() {
    let t = Instant::now();
    let mut cones_checked = 0usize;
    // every maximal cone and every face for g ≤ 3
    for g in 1..=3usize {
        for rec in enumerate_perfect(g, None).unwrap() {
            for face in rec.cone.face_index_sets() {
                let tc = ToricCone::face_of_record(&rec, &face).unwrap();
                let class = classify_singularity(&tc, DEFAULT_SCAN_BUDGET).unwrap();
                assert!(
                    matches!(
                        class,
                        SingularityClass::Smooth | SingularityClass::Terminal
                    ),
                    "g={g} face {face:?} classified {class}"
                );
                cones_checked += 1;
            }
        }
    }
    // both maximal cones for g = 4
    for rec in enumerate_perfect(4, None).unwrap() {
        let tc = ToricCone::from_record(&rec).unwrap();
        let class = classify_singularity(&tc, DEFAULT_SCAN_BUDGET).unwrap();
        assert!(
            matches!(
                class,
                SingularityClass::Smooth | SingularityClass::Terminal
            ),
            "g=4 class with kissing {} classified {class}",
            rec.minvecs.kissing
        );
        cones_checked += 1;
    }
    let elapsed = t.elapsed();
    assert!(elapsed.as_secs() <= 120, "budget is 2 min, took {elapsed:?}");
    println!(
        "criterion 4: PASS — {cones_checked} cones/faces all smooth or terminal ({elapsed:?})"
    );
}

fn random_psd(rng: &mut ChaCha8Rng, g: usize, min_rank: usize) -> SymLatticePoint {
    loop {
        let rank_target = rng.gen_range(min_rank..=g);
        let v: Vec<Vec<i64>> = (0..rank_target)
            .map(|_| (0..g).map(|_| rng.gen_range(-3..=3)).collect())
            .collect();
        let mut gram = vec![vec![0i64; g]; g];
        for i in 0..g {
            for j in 0..g {
                for row in &v {
                    gram[i][j] += row[i] * row[j];
                }
            }
        }
        let rows: Vec<&[i64]> = gram.iter().map(|r| r.as_slice()).collect();
        let b = SymLatticePoint::from_i64_rows(&rows).unwrap();
        if b.rank() >= min_rank {
            return b;
        }
    }
}

#[test]
fn criterion_5_interior_heights() {
    let t = Instant::now();
    let ctx = FanContext::new(3, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_810);
    for i in 0..500 {
        let g = rng.gen_range(2..=3);
        let b = random_psd(&mut rng, g, 2);
        let h = cocore_height(&b, &ctx).unwrap();
        assert!(h > Rat::one(), "case {i}: rank ≥ 2 form with height {h}");
    }
    // primitive rank-one points sit exactly on the hull
    for i in 0..60 {
        let g = rng.gen_range(2..=3);
        let x = loop {
            let coords: Vec<i64> = (0..g).map(|_| rng.gen_range(-4..=4i64)).collect();
            let v = IntVector::from_i64(&coords);
            if !v.is_zero() {
                break v.primitive_part();
            }
        };
        let b = rank1(&x).unwrap();
        let h = cocore_height(&b, &ctx).unwrap();
        assert_eq!(h, Rat::one(), "case {i}: primitive square must have height 1");
        let k = rng.gen_range(2..=4i64);
        let h_scaled = cocore_height(&b.scaled(&Int::from(k)), &ctx).unwrap();
        assert_eq!(h_scaled, rat(k), "case {i}: scaled square height");
    }
    let elapsed = t.elapsed();
    println!(
        "criterion 5: PASS — 500 random PSD forms of rank ≥ 2 all have co-core height > 1; 60 primitive rank-one squares (and multiples) sit at exactly 1 (and k) ({elapsed:?})"
    );
}

#[test]
fn criterion_6_extension_suite() {
    let mut checked = 0usize;
    for g in 1..=4usize {
        for rec in enumerate_perfect(g, None).unwrap() {
            let q = &rec.form;
            let ext = extend(q).unwrap();
            let mv = minimal_vectors(q).unwrap();
            let mv_ext = minimal_vectors(&ext).unwrap();
            // min(f₁) = min(f) ∪ {±e_{g+1}}, embedded
            let mut expected: Vec<IntVector> = mv
                .reps
                .iter()
                .map(|x| {
                    let mut c = x.coords().to_vec();
                    c.push(Int::zero());
                    IntVector::new(c)
                })
                .collect();
            let mut unit = vec![Int::zero(); g + 1];
            unit[g] = Int::from(1);
            expected.push(IntVector::new(unit));
            expected.sort();
            assert_eq!(mv_ext.reps, expected, "g={g}: extension minimal set");
            assert_eq!(
                perfection_rank(&ext).unwrap(),
                sym_dim(g) + 1,
                "g={g}: extension perfection rank"
            );
            checked += 1;
        }
    }
    println!(
        "criterion 6: PASS — {checked} catalogued forms with g ≤ 4 extend with min(f)∪{{±e}} and perfection rank g(g+1)/2 + 1"
    );
}

#[test]
fn criterion_7_block_sum_suite() {
    let mut catalogs: Vec<Vec<QuadForm>> = Vec::new();
    for g in 1..=3usize {
        catalogs.push(
            enumerate_perfect(g, None)
                .unwrap()
                .into_iter()
                .map(|rec| {
                    let mv = minimal_vectors(&rec.form).unwrap();
                    // normalize to minimum 2
                    rec.form.scaled(&(rat(2) / mv.minimum))
                })
                .collect(),
        );
    }
    let all: Vec<&QuadForm> = catalogs.iter().flatten().collect();
    let mut pairs = 0usize;
    for q1 in &all {
        for q2 in &all {
            let mv1 = minimal_vectors(q1).unwrap();
            let mv2 = minimal_vectors(q2).unwrap();
            assert_eq!(mv1.minimum, rat(2));
            let sum = direct_sum(q1, q2).unwrap();
            let mv = minimal_vectors(&sum).unwrap();
            assert_eq!(
                mv.kissing,
                mv1.kissing + mv2.kissing,
                "kissing additivity"
            );
            // embedded union, exact
            let mut expected: Vec<IntVector> = mv1
                .reps
                .iter()
                .map(|x| {
                    let mut c = x.coords().to_vec();
                    c.extend(std::iter::repeat(Int::zero()).take(q2.g()));
                    IntVector::new(c)
                })
                .chain(mv2.reps.iter().map(|y| {
                    let mut c = vec![Int::zero(); q1.g()];
                    c.extend(y.coords().iter().cloned());
                    IntVector::new(c)
                }))
                .collect();
            expected.sort();
            assert_eq!(mv.reps, expected, "embedded union of minimal sets");
            pairs += 1;
        }
    }
    println!(
        "criterion 7: PASS — {pairs} ordered pairs of catalogued forms (g ≤ 3, minimum 2): kissing adds and minimal sets are the embedded unions"
    );
}

#[test]
fn criterion_8_picard_arithmetic() {
    let t = Instant::now();
    let d12 = DivisorClass::from_i64(12, 1, 4, 1).unwrap();
    assert!(is_nef(&d12) && !is_ample(&d12));
    let d13 = DivisorClass::from_i64(13, 1, 4, 1).unwrap();
    assert!(is_nef(&d13) && is_ample(&d13));
    for g in 5..=15u32 {
        let k = canonical_class(g, 1).unwrap();
        assert_eq!(is_ample(&k), g >= 12, "canonical ample threshold at g={g}");
        assert_eq!(is_nef(&k), g >= 11, "canonical nef threshold at g={g}");
    }
    for n in 1..=4u32 {
        for a12 in 1..=48i64 {
            let a = Rat::new(Int::from(a12), Int::from(4)); // step 1/4 through the threshold
            let d = DivisorClass::new(a.clone(), rat(1), 3, n).unwrap();
            let threshold = Rat::new(Int::from(12), Int::from(n as i64));
            assert_eq!(is_nef(&d), a >= threshold, "nef at level {n}, a={a}");
            assert_eq!(is_ample(&d), a > threshold, "ample at level {n}, a={a}");
        }
    }
    let elapsed = t.elapsed();
    assert!(elapsed.as_secs() < 1);
    println!(
        "criterion 8: PASS — 12M−D nef-not-ample, 13M−D ample, canonical class ample iff g ≥ 12, level-n nef threshold 12/n for n=1..4 ({elapsed:?})"
    );
}

/// Independent oracle: exhaustive scan of the whole box ‖x‖∞ ≤ 6.
fn brute_force_min(q: &QuadForm, half: i64) -> (Rat, Vec<IntVector>) {
    let g = q.g();
    let width = (2 * half + 1) as usize;
    let total = width.pow(g as u32);
    let mut best: Option<Rat> = None;
    let mut reps: Vec<IntVector> = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut coords = Vec::with_capacity(g);
        for _ in 0..g {
            coords.push((c % width) as i64 - half);
            c /= width;
        }
        let x = IntVector::from_i64(&coords);
        if x.is_zero() {
            continue;
        }
        let v = q.eval(&x);
        match &best {
            Some(b) if v > *b => {}
            Some(b) if v == *b => reps.push(x),
            _ => {
                best = Some(v);
                reps = vec![x];
            }
        }
    }
    let mut canon: Vec<IntVector> = reps.iter().map(|x| x.canonical_sign()).collect();
    canon.sort();
    canon.dedup();
    (best.unwrap(), canon)
}

#[test]
fn criterion_9_oracle_equivalence() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(987_654_321);
    for i in 0..200 {
        let g = rng.gen_range(2..=3);
        // VᵀV + I keeps entries small enough that the ‖x‖∞ ≤ 6 box is
        // a complete oracle for these instances
        let v: Vec<Vec<i64>> = (0..g)
            .map(|_| (0..g).map(|_| rng.gen_range(-3..=3)).collect())
            .collect();
        let mut gram = vec![vec![0i64; g]; g];
        for r in 0..g {
            for c in 0..g {
                for row in &v {
                    gram[r][c] += row[r] * row[c];
                }
                if r == c {
                    gram[r][c] += 1;
                }
            }
        }
        let rows: Vec<&[i64]> = gram.iter().map(|r| r.as_slice()).collect();
        let q = QuadForm::from_i64_rows(&rows).unwrap();
        let mv = minimal_vectors(&q).unwrap();
        let (bmin, breps) = brute_force_min(&q, 6);
        assert_eq!(mv.minimum, bmin, "case {i}: minimum");
        assert_eq!(mv.reps, breps, "case {i}: minimal vectors");
    }

    let ctx = FanContext::new(2, None).unwrap();
    let mut rng2 = ChaCha8Rng::seed_from_u64(13);
    for i in 0..200 {
        let b = random_psd(&mut rng2, 2, 1);
        if b.is_zero() {
            continue;
        }
        let cert = locate_cone(&b, &ctx).unwrap();
        assert!(cert.verify(&b), "case {i}: certificate substitution");
        assert!(
            cert.coefficients.iter().all(|l| !l.is_negative()),
            "case {i}: nonnegative coefficients"
        );
        // the located form matches its catalog twist exactly
        let twisted = transform(&ctx.catalog(2).unwrap()[cert.class_id].form, &cert.twist)
            .unwrap()
            .scaled(&cert.scale);
        assert_eq!(twisted, cert.form, "case {i}: twist bookkeeping");
    }
    let elapsed = t.elapsed();
    println!(
        "criterion 9: PASS — 200 random forms match the exhaustive ‖x‖∞ ≤ 6 oracle; 200 membership certificates re-verify by exact substitution ({elapsed:?})"
    );
}

use bcc_lab::gf2::{random_bitmatrix, random_bitvector, rank, BitMatrix, BitVector};
use bcc_lab::model::{run, Protocol};
use bcc_lab::prg::{
    build_prg_protocol, generate, matrix_prg_output, toy_prg_outputs, PrgFixture, PrgParams, SeedBundle,
};
use bcc_lab::rng::stream;

/// `x ‖ x·M` with the product written as explicit sums.
fn oracle_output(x: &BitVector, m: &BitMatrix) -> Vec<bool> {
    let mut out: Vec<bool> = (1..=x.len()).map(|i| x.get(i)).collect();
    for j in 1..=m.cols() {
        out.push((1..=x.len()).filter(|&i| x.get(i) && m.get(i, j)).count() % 2 == 1);
    }
    out
}

#[test]
fn protocol_outputs_have_the_algebraic_form() {
    let params = PrgParams::new(8, 3, 10).unwrap();
    let protocol = build_prg_protocol(params).unwrap();
    for t in 0..300 {
        let bundle = SeedBundle::random(&params, &mut stream(21, "prg-form", t));
        let ex = run(&protocol, &bundle.to_input().unwrap()).unwrap();
        let matrix = bundle.shared_matrix(&params).unwrap();
        for (i, out) in ex.outputs.iter().enumerate() {
            let want = oracle_output(&bundle.private_seeds[i], &matrix);
            assert_eq!(out, &BitVector::from_bits(want));
        }
        assert_eq!(generate(&params, &bundle).unwrap().1, ex.outputs);
    }
}

#[test]
fn sharing_takes_ceiling_rounds() {
    for (n, k, m) in [(8, 3, 10), (3, 2, 7), (5, 5, 5), (1, 4, 9), (7, 4, 11), (16, 1, 2)] {
        let params = PrgParams::new(n, k, m).unwrap();
        let protocol = build_prg_protocol(params).unwrap();
        let want = (k * (m - k)).div_ceil(n);
        assert_eq!(params.share_len(), want);
        assert_eq!(protocol.horizon(), n * want);
        assert_eq!(protocol.m(), k + want);
    }
}

#[test]
fn outputs_span_at_most_k_dimensions() {
    for t in 0..100 {
        let (n, k, m) = (4 + t as usize % 9, 1 + t as usize % 4, 14);
        let params = PrgParams::new(n, k, m).unwrap();
        let bundle = SeedBundle::random(&params, &mut stream(22, "prg-rank", t));
        let (_, outputs) = generate(&params, &bundle).unwrap();
        let stacked = BitMatrix::from_rows_with_cols(outputs, m).unwrap();
        assert!(rank(&stacked) <= k);
    }
}

#[test]
fn generator_is_linear_in_the_seed() {
    for t in 0..200 {
        let mut rng = stream(23, "prg-linear", t);
        let (k, m) = (1 + t as usize % 6, 12);
        let matrix = random_bitmatrix(k, m - k, &mut rng);
        let x = random_bitvector(k, &mut rng);
        let y = random_bitvector(k, &mut rng);
        let sum = matrix_prg_output(&x.xor(&y).unwrap(), &matrix).unwrap();
        let parts = matrix_prg_output(&x, &matrix)
            .unwrap()
            .xor(&matrix_prg_output(&y, &matrix).unwrap())
            .unwrap();
        assert_eq!(sum, parts);
        assert_eq!(matrix_prg_output(&BitVector::zeros(k), &matrix).unwrap(), BitVector::zeros(m));
    }
}

#[test]
fn matrix_and_shares_are_inverse() {
    for t in 0..50 {
        let mut rng = stream(24, "prg-shares", t);
        let params = PrgParams::new(1 + t as usize % 7, 3, 9).unwrap();
        let matrix = random_bitmatrix(3, 6, &mut rng);
        let seeds = (0..params.n).map(|_| random_bitvector(3, &mut rng)).collect();
        let bundle = SeedBundle::from_matrix(&params, seeds, &matrix).unwrap();
        assert_eq!(bundle.shared_matrix(&params).unwrap(), matrix);
        let joined: Vec<BitVector> = bundle.to_input().unwrap().rows().to_vec();
        assert_eq!(SeedBundle::from_seeds(&params, &joined).unwrap(), bundle);
    }
}

#[test]
fn toy_generator_appends_inner_product() {
    let b: BitVector = "101".parse().unwrap();
    let seeds: Vec<BitVector> = ["000", "100", "111", "011"].iter().map(|s| s.parse().unwrap()).collect();
    let outs = toy_prg_outputs(3, &b, &seeds).unwrap();
    let strs: Vec<String> = outs.iter().map(|o| o.to_bit_string()).collect();
    assert_eq!(strs, ["0000", "1001", "1110", "0111"]);
}

#[test]
fn fixture_round_trips() {
    let params = PrgParams::new(4, 2, 6).unwrap();
    let fixture = PrgFixture::build(params, SeedBundle::random(&params, &mut stream(25, "fixture", 0))).unwrap();
    let back = PrgFixture::from_json(&fixture.to_json()).unwrap();
    assert_eq!(back, fixture);
    assert!(back.verify().unwrap());
    let mut broken = back;
    broken.outputs[0] = broken.outputs[0].xor(&BitVector::from_u64(1, 6)).unwrap();
    assert!(!broken.verify().unwrap());
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(PrgParams::new(0, 1, 2).is_err());
    assert!(PrgParams::new(2, 0, 2).is_err());
    assert!(PrgParams::new(2, 5, 4).is_err());
}

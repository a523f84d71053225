use packinglab::geometrize::{geometrize, verify_realization, PipelineOptions, TargetSpec};

fn cuboctahedron() -> TargetSpec {
    let faces: Vec<Vec<usize>> = vec![
        vec![0, 1, 4],
        vec![0, 2, 5],
        vec![1, 3, 6],
        vec![2, 3, 7],
        vec![4, 8, 9],
        vec![5, 8, 10],
        vec![6, 9, 11],
        vec![7, 10, 11],
        vec![0, 1, 2, 3],
        vec![8, 9, 10, 11],
        vec![0, 4, 5, 8],
        vec![3, 6, 7, 11],
        vec![1, 4, 6, 9],
        vec![2, 5, 7, 10],
    ];
    TargetSpec::from_polyhedron(12, &faces).unwrap()
}

#[test]
fn cuboctahedron_pipeline() {
    let t = cuboctahedron();
    let opts = PipelineOptions { d: 6, denom_bound: 64, ..PipelineOptions::default() };
    let r = geometrize(&t, &opts).unwrap();
    assert!(verify_realization(r.system.walls(), &t).ok);
    assert!(r.float.residual < 1e-9);
    assert_eq!(r.system.disc(), 6);
}

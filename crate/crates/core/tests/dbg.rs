use hfdt_core::surface::HalfEdge;

fn word_with_verts(mesh: &hfdt_core::Mesh, c: hfdt_core::CurveId, other: hfdt_core::CurveId) -> String {
    let mut s = String::new();
    for &(a, f) in &mesh.curve(c).word {
        let h = if f { HalfEdge::forward(a) } else { HalfEdge::backward(a) };
        let head = mesh.head(h);
        s.push_str(&format!("{a}"));
        if let Some(v) = head {
            let cs = mesh.curves_at_vertex(v);
            let marker = if cs.contains(&other) { "*" } else { "" };
            s.push_str(&format!("->({v}{marker})"));
        }
        s.push(' ');
    }
    s
}

#[test]
fn dbg_slide() {
    use hfdt_core::openbook::*;
    let ob = build_identity_diagram(&PageSpec { genus: 1, boundary: 1 }, false).unwrap();
    let word = vec![
        MonodromyLetter { curve: "a".into(), sign: 1 },
        MonodromyLetter { curve: "b".into(), sign: 1 },
    ];
    // run the first letter fine; second letter will hit separation
    let ob1 = apply_monodromy(&ob, &word[..1].to_vec()).unwrap();
    // apply the second twist manually without separation
    let core = core_by_name(&ob1, "b").unwrap();
    let targets: std::collections::BTreeSet<_> = ob1.diagram.beta.iter().copied().collect();
    let d = ob1.diagram.dehn_twist(core, 1, &targets).unwrap();
    let (b0, b1) = (d.beta[0], d.beta[1]);
    eprintln!("crossings b0 x b1 = {}", d.mesh.intersection_count(b0, b1));
    eprintln!("b1 word: {}", word_with_verts(&d.mesh, b1, b0));
    // one slide by hand via separate_curves with small budget? use full:
    match d.separate_curves(b0, b1) {
        Ok(sep) => eprintln!("separated fine: {}", sep.mesh.intersection_count(b0, b1)),
        Err(e) => eprintln!("separation failed: {e}"),
    }
}

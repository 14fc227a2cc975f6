use grop::{fixtures, svg};
use grop_core::grid::{rasterize, DEFAULT_RESOLUTION};
use grop_core::pipeline::{run, PipelineConfig};

#[test]
fn layouts_are_well_formed_with_one_element_per_object() {
    for t in fixtures::TASK_IDS {
        let scene = fixtures::task(t).unwrap();
        let grid = rasterize(&scene, DEFAULT_RESOLUTION);
        let out = run(&scene, &grid, &mut fixtures::static_backend(), &PipelineConfig::default(), 0).unwrap();
        let text = svg::render(&scene, Some(&out.plan));
        let doc = roxmltree::Document::parse(&text).unwrap_or_else(|e| panic!("task {t}: {e}"));
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        let placed: Vec<&str> = doc
            .descendants()
            .filter(|n| n.attribute("class") == Some("object"))
            .map(|n| n.attribute("data-name").unwrap())
            .collect();
        let mut names = scene.object_names();
        names.sort();
        let mut got: Vec<String> = placed.iter().map(|s| s.to_string()).collect();
        got.sort();
        assert_eq!(got, names, "task {t}");
        let paths = doc.descendants().filter(|n| n.attribute("class") == Some("path")).count();
        assert_eq!(paths, 2 * names.len());
    }
}

#[test]
fn scene_only_render_has_no_objects() {
    let scene = fixtures::blocked_side();
    let text = svg::render(&scene, None);
    let doc = roxmltree::Document::parse(&text).unwrap();
    let count = |class: &str| doc.descendants().filter(|n| n.attribute("class") == Some(class)).count();
    assert_eq!(count("object"), 0);
    assert_eq!(count("obstacle"), 2);
    assert_eq!(count("source"), scene.objects.len());
}

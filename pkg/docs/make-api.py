"""
    A script to generate .rst files for API documentation.

    Public modules are documented one file each. Members defined in private submodules (names starting with ``_``)
    are documented in the nearest public package that re-exports them through ``__all__``.
"""

import glob
import importlib
import inspect
import json
import os
import pkgutil
from typing import Dict, List, Optional, Tuple
import sys

from typing_validation import validate

def _list_public_modules(pkg_name: str) -> List[str]:
    modules = [pkg_name]
    for submod in pkgutil.iter_modules([pkg_name.replace(".", "/")]):
        if submod.name.startswith("_"):
            continue
        submod_fullname = pkg_name+"."+submod.name
        if submod.ispkg:
            modules.extend(_list_public_modules(submod_fullname))
        else:
            modules.append(submod_fullname)
    return modules

def _public_module(name: str) -> str:
    parts = name.split(".")
    while parts[-1].startswith("_"):
        parts.pop()
    return ".".join(parts)

def _member_kind(member: object) -> str:
    if inspect.isclass(member):
        return "class"
    if inspect.isfunction(member):
        return "function"
    if inspect.ismodule(member):
        return "module"
    return "data"

def _load_config() -> Dict[str, object]:
    err_msg = """Expected a 'make-api.json' file, with the following structure:
{
    "pkg_name": str,
    "apidocs_folder": str,
    "pkg_path": str,
    "toc_filename": str,
    "type_alias_dict_filename": Optional[str],
    "type_aliases": Dict[str, List[str]],
    "exclude_members": Dict[str, List[str]],
    "special_class_members": Dict[str, List[str]],
}
"""
    try:
        with open("make-api.json", "r", encoding="utf-8") as f:
            config = json.load(f)
        for key, kind in (("pkg_name", str), ("pkg_path", str), ("apidocs_folder", str), ("toc_filename", str),
                          ("type_alias_dict_filename", Optional[str]), ("type_aliases", Dict[str, List[str]]),
                          ("exclude_members", Dict[str, List[str]]),
                          ("special_class_members", Dict[str, List[str]])):
            validate(config.get(key), kind)
    except (FileNotFoundError, TypeError):
        print(err_msg)
        sys.exit(1)
    return config

def make_apidocs() -> None:
    """
        Generates one .rst file per public module, the API table of contents and the type alias dictionary.
    """
    # pylint: disable = too-many-locals
    config = _load_config()
    pkg_name: str = config["pkg_name"] # type: ignore
    apidocs_folder: str = config["apidocs_folder"] # type: ignore
    toc_filename: str = config["toc_filename"] # type: ignore
    type_aliases: Dict[str, List[str]] = config["type_aliases"] # type: ignore
    exclude_members: Dict[str, List[str]] = config["exclude_members"] # type: ignore
    special_class_members: Dict[str, List[str]] = config["special_class_members"] # type: ignore

    cwd = os.getcwd()
    os.chdir(config["pkg_path"]) # type: ignore
    sys.path = [os.getcwd()]+sys.path
    modules = {name: importlib.import_module(name) for name in _list_public_modules(pkg_name)}
    os.chdir(cwd)

    print(f"Removing all docfiles from {apidocs_folder}/")
    for apidoc_file in glob.glob(f"{apidocs_folder}/*.rst"):
        os.remove(apidoc_file)

    type_alias_fullnames = {name: f"{mod_name}.{name}" for mod_name, names in type_aliases.items() for name in names}

    for mod_name, mod in modules.items():
        filename = f"{apidocs_folder}/{mod_name}.rst"
        print(f"Writing API docfile {filename}")
        lines: List[str] = [mod_name, "="*len(mod_name), "", f".. automodule:: {mod_name}", ""]
        mod__all__ = getattr(mod, "__all__", None)
        if mod__all__ is None:
            mod__all__ = [name for name, member in vars(mod).items()
                          if not name.startswith("_") and getattr(member, "__module__", None) == mod_name]
        reexported: List[Tuple[str, str]] = []
        for member_name in sorted(mod__all__):
            if member_name in exclude_members.get(mod_name, []):
                continue
            member = getattr(mod, member_name)
            kind = _member_kind(member)
            member_module = inspect.getmodule(member)
            source = _public_module(member_module.__name__) if member_module is not None else mod_name
            local = source == mod_name or kind == "data" # constants and type aliases carry no usable module
            if not local:
                reexported.append((f"{source}.{member_name}" if kind != "module" else source, kind))
                continue
            fullname = f"{mod_name}.{member_name}"
            lines.extend([member_name, "-"*len(member_name), "", f".. auto{kind}:: {fullname}"])
            if kind == "class":
                lines.extend(["    :show-inheritance:", "    :members:"])
                if special_class_members.get(fullname):
                    lines.append(f"    :special-members: {', '.join(special_class_members[fullname])}")
            lines.append("")
            print(f"    {kind} {member_name}")
        if reexported:
            header = f"{mod_name}.__all__"
            lines.extend([header, "-"*len(header), "",
                          "The following members were explicitly reexported using ``__all__``:", ""])
            refkinds = {"data": "obj", "function": "func", "class": "class", "module": "mod"}
            for fullname, kind in reexported:
                lines.append(f"    - :py:{refkinds[kind]}:`{fullname}`")
            lines.append("")
        with open(filename, "w", encoding="utf-8") as f:
            f.write("\n".join(lines))

    toc_lines = [".. toctree::", "    :maxdepth: 2", "    :caption: API Documentation", ""]
    toc_lines.extend(f"    {apidocs_folder}/{mod_name}" for mod_name in modules)
    toc_lines.append("")
    print(f"Writing TOC for API docfiles at {toc_filename}")
    with open(toc_filename, "w", encoding="utf-8") as f:
        f.write("\n".join(toc_lines))

    type_alias_dict_filename: Optional[str] = config["type_alias_dict_filename"] # type: ignore
    if type_alias_dict_filename is not None:
        print(f"Writing type alias dictionary: {type_alias_dict_filename}")
        with open(type_alias_dict_filename, "w", encoding="utf-8") as f:
            json.dump(type_alias_fullnames, f, indent=4)

if __name__ == "__main__":
    make_apidocs()

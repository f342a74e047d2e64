print("# not", '"""') # yes

x = '''raw # not
  text'''
# after
